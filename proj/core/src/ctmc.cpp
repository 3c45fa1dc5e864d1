#include <tspq/ctmc.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

namespace tspq {

RateMatrix::RateMatrix(int dim) : dim_(dim) {
    if (dim < 1)
        throw std::invalid_argument("generator dimension must be >= 1");
    q_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

void RateMatrix::add_rate(int from, int to, double rate) {
    if (from < 0 || from >= dim_ || to < 0 || to >= dim_)
        throw std::out_of_range("transition endpoint outside generator");
    if (from == to)
        throw std::invalid_argument("self-transitions have no rate");
    if (!(rate >= 0) || !std::isfinite(rate))
        throw std::invalid_argument("transition rate must be finite and >= 0");
    q_[static_cast<std::size_t>(from) * dim_ + to] += rate;
    q_[static_cast<std::size_t>(from) * dim_ + from] -= rate;
}

double RateMatrix::row_sum(int row) const {
    double sum = 0.0;
    const double* r = q_.data() + static_cast<std::size_t>(row) * dim_;
    for (int c = 0; c < dim_; ++c)
        sum += r[c];
    return sum;
}

RateMatrix build_generator(const SystemParams& params, SchemeKind scheme) {
    params.validate();
    const StateSpace space(params.capacity_n);
    RateMatrix q(space.size());

    for (int idx = 0; idx < space.size(); ++idx) {
        const BufferState s = space.state_at(idx);

        if (params.lambda_rt > 0) {
            const ArrivalOutcome out = on_rt_arrival(s, params, scheme);
            if (out.action != ArrivalAction::Block)
                q.add_rate(idx, space.index_of(out.next), params.lambda_rt);
        }
        if (params.lambda_nrt > 0) {
            const ArrivalOutcome out = on_nrt_arrival(s, params, scheme);
            if (out.action != ArrivalAction::Block)
                q.add_rate(idx, space.index_of(out.next), params.lambda_nrt);
        }
        if (const auto service = on_service(s)) {
            const double rate =
                service->served == PacketClass::Rt ? params.mu_rt : params.mu_nrt;
            q.add_rate(idx, space.index_of(service->next), rate);
        }
    }
    return q;
}

std::vector<int> reachable_from(const RateMatrix& q, int start) {
    const int n = q.dim();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> frontier;
    seen[static_cast<std::size_t>(start)] = 1;
    frontier.push(start);
    while (!frontier.empty()) {
        const int s = frontier.front();
        frontier.pop();
        for (int t = 0; t < n; ++t) {
            if (t != s && !seen[static_cast<std::size_t>(t)] && q.at(s, t) > 0) {
                seen[static_cast<std::size_t>(t)] = 1;
                frontier.push(t);
            }
        }
    }
    std::vector<int> out;
    for (int s = 0; s < n; ++s)
        if (seen[static_cast<std::size_t>(s)])
            out.push_back(s);
    return out;
}

bool is_strongly_connected(const RateMatrix& q) {
    const int n = q.dim();
    if (static_cast<int>(reachable_from(q, 0).size()) != n)
        return false;
    // reverse reachability from 0
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> frontier;
    seen[0] = 1;
    frontier.push(0);
    int count = 1;
    while (!frontier.empty()) {
        const int t = frontier.front();
        frontier.pop();
        for (int s = 0; s < n; ++s) {
            if (s != t && !seen[static_cast<std::size_t>(s)] && q.at(s, t) > 0) {
                seen[static_cast<std::size_t>(s)] = 1;
                ++count;
                frontier.push(s);
            }
        }
    }
    return count == n;
}

namespace {

// GTH elimination on a dense copy restricted to `subset` (ascending state
// indices forming a closed communicating class). Returns the stationary
// probabilities of the restricted chain, in subset order.
std::vector<double> gth_solve(const RateMatrix& q, const std::vector<int>& subset) {
    const int m = static_cast<int>(subset.size());
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            if (r != c)
                a[static_cast<std::size_t>(r) * m + c] = q.at(subset[r], subset[c]);

    auto cell = [&](int r, int c) -> double& {
        return a[static_cast<std::size_t>(r) * m + c];
    };

    // Eliminate states m-1 .. 1. Diagonal cells are never read.
    std::vector<int> sources, targets;
    for (int k = m - 1; k >= 1; --k) {
        double exit = 0.0;
        targets.clear();
        for (int j = 0; j < k; ++j) {
            const double rate = cell(k, j);
            if (rate > 0) {
                exit += rate;
                targets.push_back(j);
            }
        }
        if (!(exit > 0) || !std::isfinite(exit))
            throw SolverError("state elimination hit a zero exit rate at state " +
                                  std::to_string(k),
                              m, 0.0);
        sources.clear();
        for (int i = 0; i < k; ++i)
            if (cell(i, k) > 0)
                sources.push_back(i);
        for (int i : sources) {
            const double weight = cell(i, k) / exit;
            cell(i, k) = weight;
            for (int j : targets)
                if (j != i)
                    cell(i, j) += weight * cell(k, j);
        }
    }

    // Back substitution over the stored weights, then normalize.
    std::vector<double> p(static_cast<std::size_t>(m), 0.0);
    p[0] = 1.0;
    for (int k = 1; k < m; ++k) {
        double sum = 0.0;
        for (int i = 0; i < k; ++i)
            sum += p[static_cast<std::size_t>(i)] * cell(i, k);
        p[static_cast<std::size_t>(k)] = sum;
    }
    double total = 0.0;
    for (double v : p)
        total += v;
    if (!(total > 0) || !std::isfinite(total))
        throw SolverError("state elimination produced a non-normalizable vector", m,
                          0.0);
    for (double& v : p)
        v /= total;
    return p;
}

} // namespace

namespace {

struct SolvedVector {
    std::vector<double> p;
    double residual_inf;
};

SolvedVector solve_with_residual(const RateMatrix& q) {
    const int n = q.dim();
    const std::vector<int> subset = reachable_from(q, 0);
    const std::vector<double> restricted = gth_solve(q, subset);

    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < subset.size(); ++k)
        p[static_cast<std::size_t>(subset[k])] = restricted[k];

    // Residual on the full generator: states outside the reachable class
    // receive no probability flow from inside it.
    double residual = 0.0;
    for (int c = 0; c < n; ++c) {
        double flow = 0.0;
        for (int r = 0; r < n; ++r) {
            const double pr = p[static_cast<std::size_t>(r)];
            if (pr != 0.0)
                flow += pr * q.at(r, c);
        }
        residual = std::max(residual, std::abs(flow));
    }
    if (residual > kResidualTolerance)
        throw SolverError("stationary residual above tolerance", n, residual);
    return {std::move(p), residual};
}

} // namespace

std::vector<double> stationary_vector(const RateMatrix& q) {
    return solve_with_residual(q).p;
}

StationaryDistribution solve_stationary(const RateMatrix& q, const StateSpace& space) {
    if (space.size() != q.dim())
        throw std::invalid_argument("state space size does not match generator");
    SolvedVector solved = solve_with_residual(q);
    return {space, std::move(solved.p), solved.residual_inf};
}

StationaryDistribution solve_model(const SystemParams& params, SchemeKind scheme) {
    return solve_stationary(build_generator(params, scheme),
                            StateSpace(params.capacity_n));
}

void write_matrix(std::ostream& os, const RateMatrix& q) {
    os.precision(17);
    for (int r = 0; r < q.dim(); ++r) {
        for (int c = 0; c < q.dim(); ++c) {
            if (c)
                os << ' ';
            os << q.at(r, c);
        }
        os << '\n';
    }
}

void write_distribution(std::ostream& os, const StationaryDistribution& dist) {
    os.precision(17);
    for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
        if (k)
            os << ' ';
        os << dist.probabilities[k];
    }
    os << '\n';
}

} // namespace tspq
