#include <doctest.h>

#include <cmath>

#include <tspq/metrics.hpp>

#include "oracles.hpp"

using namespace tspq;

namespace {

StationaryDistribution point_mass(int capacity, const BufferState& at) {
    StateSpace space(capacity);
    std::vector<double> p(static_cast<std::size_t>(space.size()), 0.0);
    p[static_cast<std::size_t>(space.index_of(at))] = 1.0;
    return {space, std::move(p), 0.0};
}

} // namespace

TEST_CASE("no mass on the full diagonal means no loss") {
    const SystemParams params{3, 2, 10.0, 8.0, 30.0, 25.0};
    const auto dist = point_mass(3, {1, 1});
    const auto [rt, nrt] = loss_probabilities_closed_form(dist, params);
    CHECK(rt == 0.0);
    CHECK(nrt == 0.0);
    const auto rate_based =
        loss_probabilities_rate_based(dist, params, SchemeKind::EbTsp);
    CHECK(*rate_based.rt == 0.0);
    CHECK(*rate_based.nrt == 0.0);
}

TEST_CASE("occupancy of deterministic states") {
    const auto empty = mean_occupancy(point_mass(8, {0, 0}));
    CHECK(empty.rt == 0.0);
    CHECK(empty.nrt == 0.0);
    const auto loaded = mean_occupancy(point_mass(8, {3, 5}));
    CHECK(loaded.rt == doctest::Approx(3.0));
    CHECK(loaded.nrt == doctest::Approx(5.0));
}

TEST_CASE("delay formulas by direct substitution") {
    const SystemParams params{60, 15, 10.0, 8.0, 30.0, 25.0};
    const MeanOccupancy occupancy{0.5, 1.5};
    const LossProbabilities losses{0.0, 0.0};
    const MeanDelays delays = little_delays(occupancy, losses, params);
    CHECK(*delays.rt == doctest::Approx(0.05).epsilon(1e-12));
    // NRT delay counts the RT packets it waits behind
    CHECK(*delays.nrt == doctest::Approx(2.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("closed-form and rate-based losses agree for the push-out scheme") {
    for (int n = 2; n <= 6; ++n) {
        for (int r = 1; r <= n; ++r) {
            for (const SystemParams& params :
                 {SystemParams{n, r, 2, 3, 5, 7},
                  SystemParams{n, r, 10, 8, 30, 25}}) {
                const auto dist = solve_model(params, SchemeKind::EbTsp);
                const auto closed = loss_probabilities_closed_form(dist, params);
                const auto rated =
                    loss_probabilities_rate_based(dist, params, SchemeKind::EbTsp);
                CHECK(std::abs(closed.first - *rated.rt) <= 1e-12);
                CHECK(std::abs(closed.second - *rated.nrt) <= 1e-12);
            }
        }
    }
    const SystemParams table{60, 15, 30.0, 8.0, 30.0, 25.0};
    const auto dist = solve_model(table, SchemeKind::EbTsp);
    const auto closed = loss_probabilities_closed_form(dist, table);
    const auto rated = loss_probabilities_rate_based(dist, table, SchemeKind::EbTsp);
    CHECK(std::abs(closed.first - *rated.rt) <= 1e-12);
    CHECK(std::abs(closed.second - *rated.nrt) <= 1e-12);
}

TEST_CASE("baseline NRT loss is pure blocking") {
    const SystemParams params{6, 2, 9.0, 4.0, 12.0, 10.0};
    const auto dist = solve_model(params, SchemeKind::BTsp);
    const auto losses = loss_probabilities_rate_based(dist, params, SchemeKind::BTsp);
    double full_mass = 0.0;
    for (int i = 0; i <= params.capacity_n; ++i)
        full_mass += dist.probability({i, params.capacity_n - i});
    CHECK(std::abs(*losses.nrt - full_mass) <= 1e-12);
}

TEST_CASE("single-class reductions match M/M/1/K closed forms") {
    SUBCASE("NRT only") {
        const SystemParams params{3, 1, 0.0, 8.0, 30.0, 25.0};
        const auto oracle = test::mm1k(8.0, 25.0, 3);
        for (SchemeKind scheme : {SchemeKind::EbTsp, SchemeKind::BTsp}) {
            const auto dist = solve_model(params, scheme);
            const QosReport qos = analytic_qos(dist, params, scheme);
            CHECK_FALSE(qos.p_loss_rt.has_value());
            CHECK_FALSE(qos.d_rt.has_value());
            CHECK(qos.n_rt == 0.0);
            CHECK(std::abs(*qos.p_loss_nrt - oracle.blocking) <= 1e-10);
            CHECK(std::abs(*qos.p_loss_nrt - 0.0225184) <= 1e-7);
            CHECK(std::abs(qos.n_nrt - oracle.mean_number) <= 1e-10);
            CHECK(std::abs(*qos.d_nrt - oracle.mean_sojourn) <= 1e-10);
        }
    }
    SUBCASE("RT only, push-out scheme fills the whole buffer") {
        const SystemParams params{5, 2, 6.0, 0.0, 4.0, 25.0};
        const auto dist = solve_model(params, SchemeKind::EbTsp);
        const QosReport qos = analytic_qos(dist, params, SchemeKind::EbTsp);
        const auto oracle = test::mm1k(6.0, 4.0, 5);
        CHECK_FALSE(qos.p_loss_nrt.has_value());
        CHECK(std::abs(*qos.p_loss_rt - oracle.blocking) <= 1e-10);
        CHECK(std::abs(qos.n_rt - oracle.mean_number) <= 1e-10);
        CHECK(std::abs(*qos.d_rt - oracle.mean_sojourn) <= 1e-10);
    }
    SUBCASE("RT only, baseline caps the queue at the threshold") {
        const SystemParams params{5, 2, 6.0, 0.0, 4.0, 25.0};
        const auto dist = solve_model(params, SchemeKind::BTsp);
        const QosReport qos = analytic_qos(dist, params, SchemeKind::BTsp);
        const auto oracle = test::mm1k(6.0, 4.0, 2);
        CHECK(std::abs(*qos.p_loss_rt - oracle.blocking) <= 1e-10);
        CHECK(std::abs(qos.n_rt - oracle.mean_number) <= 1e-10);
        CHECK(std::abs(*qos.d_rt - oracle.mean_sojourn) <= 1e-10);
    }
}

TEST_CASE("closed forms require both arrival rates") {
    const SystemParams params{3, 1, 0.0, 8.0, 30.0, 25.0};
    const auto dist = solve_model(params, SchemeKind::EbTsp);
    CHECK_THROWS_AS(loss_probabilities_closed_form(dist, params),
                    std::invalid_argument);
}

TEST_CASE("report bounds and monotonicity over a sweep") {
    const int n = 10;
    const int r = 3;
    std::optional<double> last_eb, last_b;
    for (double lambda_rt = 1.0; lambda_rt <= 19.0; lambda_rt += 2.0) {
        const SystemParams params{n, r, lambda_rt, 3.0, 6.0, 5.0};
        QosReport eb, b;
        for (SchemeKind scheme : {SchemeKind::EbTsp, SchemeKind::BTsp}) {
            const auto dist = solve_model(params, scheme);
            const QosReport qos = analytic_qos(dist, params, scheme);
            CHECK(*qos.p_loss_rt >= 0.0);
            CHECK(*qos.p_loss_rt <= 1.0);
            CHECK(*qos.p_loss_nrt >= 0.0);
            CHECK(*qos.p_loss_nrt <= 1.0);
            CHECK(qos.n_rt >= 0.0);
            CHECK(qos.n_nrt >= 0.0);
            CHECK(qos.n_rt + qos.n_nrt <= n);
            CHECK(*qos.d_rt > 0.0);
            CHECK(*qos.d_nrt > 0.0);
            (scheme == SchemeKind::EbTsp ? eb : b) = qos;
        }
        CHECK(b.n_rt <= r + 1e-9);
        // the push-out scheme never loses more RT traffic than the baseline
        CHECK(*eb.p_loss_rt <= *b.p_loss_rt + 1e-12);
        if (last_eb)
            CHECK(*eb.p_loss_rt >= *last_eb - 1e-12);
        if (last_b)
            CHECK(*b.p_loss_rt >= *last_b - 1e-12);
        last_eb = eb.p_loss_rt;
        last_b = b.p_loss_rt;
    }
}
