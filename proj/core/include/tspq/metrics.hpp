#pragma once

#include <optional>
#include <utility>

#include <tspq/ctmc.hpp>
#include <tspq/params.hpp>

namespace tspq {

/// Per-class loss probabilities. A class with zero arrival rate has no
/// defined loss and carries nullopt.
struct LossProbabilities {
    std::optional<double> rt;
    std::optional<double> nrt;
};

/// Mean number of packets of each class in the buffer at steady state.
struct MeanOccupancy {
    double rt = 0.0;
    double nrt = 0.0;
};

/// Mean sojourn times per class; nullopt when the effective arrival rate of
/// the class is zero.
struct MeanDelays {
    std::optional<double> rt;
    std::optional<double> nrt;
};

/// QoS summary for one parameter point: loss probabilities, mean buffer
/// occupancies and mean delays per class. Undefined entries (class absent)
/// are nullopt rather than NaN.
struct QosReport {
    std::optional<double> p_loss_rt;
    std::optional<double> p_loss_nrt;
    double n_rt = 0.0;
    double n_nrt = 0.0;
    std::optional<double> d_rt;
    std::optional<double> d_nrt;

    friend bool operator==(const QosReport&, const QosReport&) = default;
};

/// Closed-form loss probabilities for the push-out scheme (EbTsp), summed
/// over the full-buffer diagonal:
///
///   P_loss_rt  = sum_{i=R..N} p(i, N-i) + (lambda_nrt/lambda_rt) * sum_{i=R+1..N} p(i, N-i)
///   P_loss_nrt = sum_{i=0..R} p(i, N-i) + (lambda_rt/lambda_nrt) * sum_{i=0..R-1} p(i, N-i)
///
/// The first term of each is the blocking probability seen by that class,
/// the second converts the other class's push-out rate into a per-arrival
/// loss fraction. Requires both arrival rates strictly positive; throws
/// std::invalid_argument otherwise (use the rate-based route then).
std::pair<double, double> loss_probabilities_closed_form(
    const StationaryDistribution& dist, const SystemParams& params);

/// Loss probabilities for either scheme by rate accounting over all states:
/// a class loses an arrival where it is blocked, and loses a queued packet
/// where an arrival of the other class evicts it; both flows are normalized
/// by the class arrival rate.
LossProbabilities loss_probabilities_rate_based(const StationaryDistribution& dist,
                                                const SystemParams& params,
                                                SchemeKind scheme);

/// Mean per-class buffer occupancy: sum of i*p(i,j) and j*p(i,j).
MeanOccupancy mean_occupancy(const StationaryDistribution& dist);

/// Mean delays from Little's law:
///
///   D_rt  = N_rt / (lambda_rt * (1 - P_loss_rt))
///   D_nrt = (N_rt + N_nrt) / (lambda_nrt * (1 - P_loss_nrt))
///
/// The NRT numerator includes the RT occupancy: an admitted NRT packet waits
/// behind every queued RT packet as well as its own class. Entries with zero
/// effective arrival rate are nullopt.
MeanDelays little_delays(const MeanOccupancy& occupancy,
                         const LossProbabilities& losses,
                         const SystemParams& params);

/// Full analytic QoS report via the rate-based loss route (defined for both
/// schemes and for degenerate single-class loads).
QosReport analytic_qos(const StationaryDistribution& dist, const SystemParams& params,
                       SchemeKind scheme);

} // namespace tspq
