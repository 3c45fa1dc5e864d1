#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <tspq/metrics.hpp>
#include <tspq/params.hpp>

namespace tspq {

/// Termination rule for one simulation run: a fixed number of events or a
/// simulated-time horizon.
struct StopRule {
    enum class Kind { Events, Time };

    Kind kind = Kind::Events;
    std::uint64_t event_budget = 0;
    double time_horizon = 0.0;

    static StopRule events(std::uint64_t budget) {
        return {Kind::Events, budget, 0.0};
    }
    static StopRule simulated_time(double horizon) {
        return {Kind::Time, 0, horizon};
    }
};

struct SimConfig {
    SystemParams params;
    SchemeKind scheme = SchemeKind::EbTsp;
    std::uint64_t seed = 1;
    StopRule stop = StopRule::events(1'000'000);
    double warmup_fraction = 0.1; ///< leading fraction of the budget discarded
    int batch_count = 32;         ///< batches for batch-means standard errors
    std::ostream* trace = nullptr; ///< optional event trace (debug, small runs)

    void validate() const;
};

/// Event and sojourn tallies for one class, restricted to packets that
/// arrived inside the measurement window. The identities
///
///   arrivals  = admitted + blocked
///   admitted  = served + evicted + in_buffer_at_end
///
/// hold exactly.
struct ClassCounters {
    std::uint64_t arrivals = 0;
    std::uint64_t admitted = 0;
    std::uint64_t blocked = 0;
    std::uint64_t evicted = 0; ///< push-out victims
    std::uint64_t served = 0;
    std::uint64_t in_buffer_at_end = 0;
    double sojourn_served = 0.0;    ///< summed sojourn of served packets
    double sojourn_completed = 0.0; ///< summed sojourn of served + evicted packets
};

/// Raw per-batch sums backing the batch-means standard errors.
struct BatchTally {
    std::uint64_t rt_arrivals = 0;
    std::uint64_t rt_lost = 0; ///< blocked + evicted
    std::uint64_t nrt_arrivals = 0;
    std::uint64_t nrt_lost = 0;
    std::uint64_t rt_served = 0;
    std::uint64_t nrt_served = 0;
    double rt_sojourn = 0.0;
    double nrt_sojourn = 0.0;
    double occ_rt_time = 0.0;
    double occ_nrt_time = 0.0;
    double elapsed = 0.0;
};

struct SimCounters {
    ClassCounters rt;
    ClassCounters nrt;
    double occ_rt_time = 0.0;  ///< integral of the RT count over the window
    double occ_nrt_time = 0.0; ///< integral of the NRT count over the window
    double elapsed = 0.0;      ///< measurement window length
    double window_start = 0.0;
    double window_end = 0.0;
    std::uint64_t total_events = 0; ///< processed events including warmup
    std::vector<BatchTally> batches;
};

/// Runs one packet-by-packet simulation of the configured scheme.
///
/// Competing exponential clocks (RT arrivals, NRT arrivals, and the service
/// of the current head-of-line class) are resampled after every event, which
/// is exact under the memoryless arrival and service assumptions. All state
/// changes go through the policy rules; push-out evicts the tail packet of
/// the victim class. A fixed (seed, config) pair reproduces the counters
/// exactly.
SimCounters run_simulation(const SimConfig& config);

/// QoS estimates from one run, with batch-means standard errors.
struct SimQos {
    QosReport qos; ///< losses, time-average occupancies, served-packet delays
    std::optional<double> d_rt_admitted;  ///< mean sojourn over served + evicted
    std::optional<double> d_nrt_admitted;
    std::optional<double> se_p_loss_rt;
    std::optional<double> se_p_loss_nrt;
    std::optional<double> se_n_rt;
    std::optional<double> se_n_nrt;
    std::optional<double> se_d_rt;
    std::optional<double> se_d_nrt;
};

/// Point estimates and standard errors from completed-run counters:
/// losses = (blocked + evicted) / arrivals, occupancies = time integrals over
/// the window, delays = served sojourn sums over served counts. Classes with
/// no arrivals get nullopt. Throws std::invalid_argument when the measured
/// window is empty.
SimQos qos_from_sim(const SimCounters& counters, const SystemParams& params);

/// Relative Little's-law gap per class: |L - lambda_admitted * W_admitted| / L
/// with L the time-average occupancy, lambda_admitted the admission rate and
/// W_admitted the mean sojourn of admitted packets that completed (served or
/// evicted). nullopt for a class that never held a packet.
struct LittleLawGap {
    std::optional<double> rt;
    std::optional<double> nrt;
};
LittleLawGap little_law_gap(const SimCounters& counters);

} // namespace tspq
