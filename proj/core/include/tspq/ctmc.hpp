#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <tspq/params.hpp>
#include <tspq/policy.hpp>

namespace tspq {

/// Max-norm bound enforced on the stationary residual ||p.Q||_inf.
inline constexpr double kResidualTolerance = 1e-10;

/// Dense infinitesimal generator over an enumerated state space.
///
/// Row = source state index, column = target state index. Off-diagonal
/// entries are nonnegative transition rates, the diagonal holds the negative
/// row exit rate, so every row sums to zero up to rounding.
class RateMatrix {
public:
    explicit RateMatrix(int dim);

    int dim() const { return dim_; }

    double at(int from, int to) const {
        return q_[static_cast<std::size_t>(from) * dim_ + to];
    }

    /// Accumulates `rate` on the (from, to) off-diagonal entry and keeps the
    /// diagonal equal to the negative row exit rate.
    void add_rate(int from, int to, double rate);

    double row_sum(int row) const;

    const std::vector<double>& data() const { return q_; }

private:
    int dim_;
    std::vector<double> q_;
};

/// Builds the generator for the given scheme by applying the arrival and
/// service event rules to every state: rate lambda_rt toward the RT-arrival
/// successor (nothing on Block), rate lambda_nrt toward the NRT-arrival
/// successor, and the class service rate toward the service successor.
RateMatrix build_generator(const SystemParams& params, SchemeKind scheme);

/// Signals a failed stationary solve; carries the offending dimension and,
/// when the solve completed numerically, the residual that broke tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int dim, double residual)
        : std::runtime_error(what + " (dim=" + std::to_string(dim) +
                             ", residual=" + std::to_string(residual) + ")"),
          dim_(dim),
          residual_(residual) {}

    int dim() const { return dim_; }
    double residual() const { return residual_; }

private:
    int dim_;
    double residual_;
};

/// Stationary probability vector of `q`, solved by state elimination on the
/// communicating class reachable from state 0 (Grassmann/Taksar/Heyman
/// recursion: additions and divisions of nonnegative quantities only, no
/// subtractive cancellation). States outside that class get probability 0.
///
/// Throws SolverError if the elimination hits a zero exit rate or the
/// residual ||p.Q||_inf exceeds kResidualTolerance.
std::vector<double> stationary_vector(const RateMatrix& q);

/// Stationary distribution p(i, j) indexed in the canonical state order.
struct StationaryDistribution {
    StateSpace space;
    std::vector<double> probabilities;
    double residual_inf = 0.0; ///< ||p.Q||_inf reported by the solve

    double probability(const BufferState& s) const {
        return probabilities[static_cast<std::size_t>(space.index_of(s))];
    }
};

/// stationary_vector plus the state-space wrapper; `space.size()` must equal
/// `q.dim()`.
StationaryDistribution solve_stationary(const RateMatrix& q, const StateSpace& space);

/// build_generator + solve_stationary for one parameter point.
StationaryDistribution solve_model(const SystemParams& params, SchemeKind scheme);

/// State indices reachable from `start` along positive-rate transitions
/// (ascending order; includes `start`).
std::vector<int> reachable_from(const RateMatrix& q, int start);

/// True when the positive-rate transition graph is strongly connected.
bool is_strongly_connected(const RateMatrix& q);

/// Plain-text debug dumps: one row per line, space-separated decimal values.
void write_matrix(std::ostream& os, const RateMatrix& q);
void write_distribution(std::ostream& os, const StationaryDistribution& dist);

} // namespace tspq
