#include <doctest.h>

#include <cmath>
#include <sstream>

#include <tspq/ctmc.hpp>
#include <tspq/metrics.hpp>
#include <tspq/sim.hpp>

#include "oracles.hpp"

using namespace tspq;

namespace {

SimConfig table_config(double lambda_rt, std::uint64_t events,
                       std::uint64_t seed = 20240601) {
    SimConfig config;
    config.params = {60, 15, lambda_rt, 8.0, 30.0, 25.0};
    config.scheme = SchemeKind::EbTsp;
    config.seed = seed;
    config.stop = StopRule::events(events);
    return config;
}

void check_flow_conservation(const SimCounters& counters) {
    for (const ClassCounters* cls : {&counters.rt, &counters.nrt}) {
        CHECK(cls->arrivals == cls->admitted + cls->blocked);
        CHECK(cls->admitted == cls->served + cls->evicted + cls->in_buffer_at_end);
    }
}

bool counters_equal(const SimCounters& a, const SimCounters& b) {
    const auto cls_equal = [](const ClassCounters& x, const ClassCounters& y) {
        return x.arrivals == y.arrivals && x.admitted == y.admitted &&
               x.blocked == y.blocked && x.evicted == y.evicted &&
               x.served == y.served && x.in_buffer_at_end == y.in_buffer_at_end &&
               x.sojourn_served == y.sojourn_served &&
               x.sojourn_completed == y.sojourn_completed;
    };
    return cls_equal(a.rt, b.rt) && cls_equal(a.nrt, b.nrt) &&
           a.occ_rt_time == b.occ_rt_time && a.occ_nrt_time == b.occ_nrt_time &&
           a.elapsed == b.elapsed && a.total_events == b.total_events;
}

} // namespace

TEST_CASE("no arrivals means an empty run") {
    SimConfig config;
    config.params = {4, 2, 0.0, 0.0, 30.0, 25.0};
    config.stop = StopRule::events(1000);
    const SimCounters counters = run_simulation(config);
    CHECK(counters.total_events == 0);
    CHECK(counters.rt.arrivals == 0);
    CHECK(counters.nrt.arrivals == 0);
    CHECK(counters.elapsed == 0.0);
    CHECK(counters.occ_rt_time == 0.0);
    CHECK(counters.occ_nrt_time == 0.0);
}

TEST_CASE("identical seed and config reproduce the counters exactly") {
    const SimConfig config = table_config(30.0, 200'000);
    const SimCounters first = run_simulation(config);
    const SimCounters second = run_simulation(config);
    CHECK(counters_equal(first, second));

    SimConfig other = config;
    other.seed = config.seed + 1;
    CHECK_FALSE(counters_equal(first, run_simulation(other)));
}

TEST_CASE("flow conservation identities hold exactly") {
    SUBCASE("event budget with warmup") {
        const SimCounters counters = run_simulation(table_config(30.0, 200'000));
        CHECK(counters.total_events == 200'000);
        check_flow_conservation(counters);
        CHECK(counters.rt.evicted + counters.nrt.evicted > 0);
    }
    SUBCASE("time horizon") {
        SimConfig config = table_config(30.0, 0);
        config.stop = StopRule::simulated_time(500.0);
        const SimCounters counters = run_simulation(config);
        CHECK(counters.window_end == 500.0);
        check_flow_conservation(counters);
    }
    SUBCASE("baseline scheme") {
        SimConfig config = table_config(30.0, 200'000);
        config.scheme = SchemeKind::BTsp;
        const SimCounters counters = run_simulation(config);
        check_flow_conservation(counters);
        CHECK(counters.rt.evicted == 0);
        CHECK(counters.nrt.evicted == 0);
    }
}

TEST_CASE("occupancy integrals stay inside the physical bounds") {
    const SimCounters counters = run_simulation(table_config(40.0, 100'000));
    CHECK(counters.occ_rt_time >= 0.0);
    CHECK(counters.occ_nrt_time >= 0.0);
    CHECK(counters.occ_rt_time + counters.occ_nrt_time <=
          60.0 * counters.elapsed + 1e-9);
}

TEST_CASE("single-class run reproduces the M/M/1/N blocking probability") {
    SimConfig config;
    config.params = {3, 1, 0.0, 8.0, 30.0, 25.0};
    config.seed = 7;
    config.stop = StopRule::events(10'000'000);
    const SimCounters counters = run_simulation(config);
    const SimQos sim = qos_from_sim(counters, config.params);
    const auto oracle = test::mm1k(8.0, 25.0, 3);

    REQUIRE(sim.qos.p_loss_nrt.has_value());
    REQUIRE(sim.se_p_loss_nrt.has_value());
    CHECK(std::abs(*sim.qos.p_loss_nrt - oracle.blocking) <=
          3.0 * *sim.se_p_loss_nrt);
    CHECK(std::abs(*sim.qos.p_loss_nrt - 0.0225184) <= 3.0 * *sim.se_p_loss_nrt);

    REQUIRE(sim.qos.d_nrt.has_value());
    REQUIRE(sim.se_d_nrt.has_value());
    CHECK(std::abs(*sim.qos.d_nrt - oracle.mean_sojourn) <= 3.0 * *sim.se_d_nrt);

    REQUIRE(sim.se_n_nrt.has_value());
    CHECK(std::abs(sim.qos.n_nrt - oracle.mean_number) <= 3.0 * *sim.se_n_nrt);

    CHECK_FALSE(sim.qos.p_loss_rt.has_value());
    CHECK_FALSE(sim.qos.d_rt.has_value());
}

TEST_CASE("simulation agrees with the analytic pipeline at a loaded point") {
    const SimConfig config = table_config(30.0, 10'000'000);
    const SimCounters counters = run_simulation(config);
    const SimQos sim = qos_from_sim(counters, config.params);

    const auto dist = solve_model(config.params, config.scheme);
    const QosReport analytic = analytic_qos(dist, config.params, config.scheme);

    CHECK(std::abs(*sim.qos.p_loss_rt - *analytic.p_loss_rt) <=
          3.0 * *sim.se_p_loss_rt);
    CHECK(std::abs(*sim.qos.p_loss_nrt - *analytic.p_loss_nrt) <=
          3.0 * *sim.se_p_loss_nrt);
    CHECK(std::abs(sim.qos.n_rt - analytic.n_rt) <= 3.0 * *sim.se_n_rt);
    CHECK(std::abs(sim.qos.n_nrt - analytic.n_nrt) <= 3.0 * *sim.se_n_nrt);
}

TEST_CASE("Little's law self-check on a nondegenerate run") {
    const SimCounters counters = run_simulation(table_config(20.0, 1'000'000));
    const LittleLawGap gap = little_law_gap(counters);
    REQUIRE(gap.rt.has_value());
    REQUIRE(gap.nrt.has_value());
    CHECK(*gap.rt <= 0.02);
    CHECK(*gap.nrt <= 0.02);
}

TEST_CASE("estimates from hand-built counters") {
    SimCounters counters;
    counters.elapsed = 100.0;
    counters.occ_rt_time = 150.0;
    counters.occ_nrt_time = 50.0;
    counters.rt.arrivals = 1000;
    counters.rt.admitted = 1000;
    counters.rt.served = 990;
    counters.rt.in_buffer_at_end = 10;
    counters.rt.sojourn_served = 99.0;
    counters.rt.sojourn_completed = 99.0;
    const SystemParams params{60, 15, 10.0, 8.0, 30.0, 25.0};

    const SimQos sim = qos_from_sim(counters, params);
    CHECK(*sim.qos.p_loss_rt == 0.0);
    CHECK_FALSE(sim.qos.p_loss_nrt.has_value()); // no NRT arrivals
    CHECK(sim.qos.n_rt == doctest::Approx(1.5));
    CHECK(*sim.qos.d_rt == doctest::Approx(0.1));
    CHECK_FALSE(sim.se_p_loss_rt.has_value()); // no batch data

    SimCounters empty;
    CHECK_THROWS_AS(qos_from_sim(empty, params), std::invalid_argument);
}

TEST_CASE("event trace lists every event with both states") {
    std::ostringstream trace;
    SimConfig config = table_config(30.0, 50, 3);
    config.params.capacity_n = 4;
    config.params.threshold_r = 2;
    config.trace = &trace;
    const SimCounters counters = run_simulation(config);

    std::istringstream lines(trace.str());
    std::string line;
    std::uint64_t count = 0;
    while (std::getline(lines, line)) {
        CHECK(line.find("->") != std::string::npos);
        ++count;
    }
    CHECK(count == counters.total_events);
}

TEST_CASE("configuration validation") {
    SimConfig config = table_config(10.0, 1000);
    CHECK_NOTHROW(config.validate());
    config.warmup_fraction = 0.6;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.warmup_fraction = 0.1;
    config.stop = StopRule::events(0);
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.stop = StopRule::simulated_time(-1.0);
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.stop = StopRule::events(1000);
    config.batch_count = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
