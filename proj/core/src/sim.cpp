#include <tspq/sim.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <random>
#include <stdexcept>

#include <tspq/policy.hpp>

namespace tspq {

void SimConfig::validate() const {
    params.validate();
    switch (stop.kind) {
    case StopRule::Kind::Events:
        if (stop.event_budget == 0)
            throw std::invalid_argument("event budget must be > 0");
        break;
    case StopRule::Kind::Time:
        if (!(stop.time_horizon > 0) || !std::isfinite(stop.time_horizon))
            throw std::invalid_argument("time horizon must be finite and > 0");
        break;
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction <= 0.5))
        throw std::invalid_argument("warmup fraction must lie in [0, 0.5]");
    if (batch_count < 1)
        throw std::invalid_argument("batch count must be >= 1");
}

namespace {

// One stream per run: mt19937_64 (the engine is fully specified by the
// standard, unlike the standard library distributions) with an explicit
// inverse-transform exponential, so the event sequence is a pure function of
// (seed, config).
class EventClock {
public:
    explicit EventClock(std::uint64_t seed) : rng_(seed) {}

    // uniform on (0, 1]
    double uniform_pos() {
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }
    // uniform on [0, 1)
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

private:
    std::mt19937_64 rng_;
};

struct Packet {
    double arrive_t = 0.0;
    bool measured = false; ///< admitted inside the measurement window
};

enum class EventKind { RtArrival, NrtArrival, Service };

const char* kind_name(EventKind kind) {
    switch (kind) {
    case EventKind::RtArrival: return "rt-arrival";
    case EventKind::NrtArrival: return "nrt-arrival";
    case EventKind::Service: return "service";
    }
    return "?";
}

class SimulationRun {
public:
    explicit SimulationRun(const SimConfig& config)
        : cfg_(config), clock_(config.seed) {
        cfg_.validate();
        counters_.batches.assign(static_cast<std::size_t>(cfg_.batch_count),
                                 BatchTally{});
        if (cfg_.stop.kind == StopRule::Kind::Events) {
            warmup_events_ = static_cast<std::uint64_t>(
                cfg_.warmup_fraction *
                static_cast<double>(cfg_.stop.event_budget));
            measured_events_ = cfg_.stop.event_budget - warmup_events_;
        } else {
            window_start_ = cfg_.warmup_fraction * cfg_.stop.time_horizon;
        }
    }

    SimCounters run() {
        while (step()) {
        }
        finish();
        return std::move(counters_);
    }

private:
    BufferState state() const {
        return {static_cast<int>(rt_q_.size()), static_cast<int>(nrt_q_.size())};
    }

    bool measuring_event(std::uint64_t event_index, double event_time) const {
        if (cfg_.stop.kind == StopRule::Kind::Events)
            return event_index >= warmup_events_;
        return event_time >= window_start_;
    }

    std::size_t batch_of_event(std::uint64_t event_index, double event_time) const {
        const auto b = static_cast<std::size_t>(cfg_.batch_count);
        if (cfg_.stop.kind == StopRule::Kind::Events) {
            const std::uint64_t k = (event_index - warmup_events_) * b;
            return static_cast<std::size_t>(k / measured_events_);
        }
        const double span = cfg_.stop.time_horizon - window_start_;
        const double pos = (event_time - window_start_) / span;
        const auto idx = static_cast<std::size_t>(pos * static_cast<double>(b));
        return std::min(idx, b - 1);
    }

    // Accrues the dwell interval [from, to] at the current state, clipped to
    // the measurement window and split over batches.
    void accrue_dwell(double from, double to, std::uint64_t next_event_index) {
        const BufferState s = state();
        if (cfg_.stop.kind == StopRule::Kind::Events) {
            if (next_event_index < warmup_events_)
                return;
            if (!window_started_) {
                window_started_ = true;
                counters_.window_start = from;
            }
            add_dwell(batch_of_event(next_event_index, 0.0), s, to - from);
            return;
        }
        const double lo = std::max(from, window_start_);
        const double hi = std::min(to, cfg_.stop.time_horizon);
        if (hi <= lo)
            return;
        window_started_ = true;
        counters_.window_start = window_start_;
        // split across batch boundaries
        const double span = cfg_.stop.time_horizon - window_start_;
        const double width = span / cfg_.batch_count;
        double t = lo;
        while (t < hi) {
            const auto k = std::min(
                static_cast<std::size_t>((t - window_start_) / width),
                static_cast<std::size_t>(cfg_.batch_count) - 1);
            const double edge =
                k + 1 == static_cast<std::size_t>(cfg_.batch_count)
                    ? hi
                    : std::min(hi, window_start_ + (k + 1) * width);
            add_dwell(k, s, std::max(0.0, edge - t));
            if (edge <= t)
                break;
            t = edge;
        }
    }

    void add_dwell(std::size_t batch, const BufferState& s, double dt) {
        counters_.occ_rt_time += s.rt * dt;
        counters_.occ_nrt_time += s.nrt * dt;
        counters_.elapsed += dt;
        BatchTally& tally = counters_.batches[batch];
        tally.occ_rt_time += s.rt * dt;
        tally.occ_nrt_time += s.nrt * dt;
        tally.elapsed += dt;
    }

    void check_state(const BufferState& expected) const {
        const BufferState actual = state();
        if (actual != expected || actual.total() > cfg_.params.capacity_n ||
            actual.rt < 0 || actual.nrt < 0)
            throw std::logic_error("simulation left the legal state space");
    }

    bool step() {
        if (cfg_.stop.kind == StopRule::Kind::Events &&
            event_index_ >= cfg_.stop.event_budget)
            return false;

        const BufferState before = state();
        const double rt_rate = cfg_.params.lambda_rt;
        const double nrt_rate = cfg_.params.lambda_nrt;
        double service_rate = 0.0;
        const auto service = on_service(before);
        if (service)
            service_rate = service->served == PacketClass::Rt ? cfg_.params.mu_rt
                                                              : cfg_.params.mu_nrt;
        const double total = rt_rate + nrt_rate + service_rate;
        if (total <= 0)
            return false; // nothing can ever fire again

        const double dt = clock_.exponential(total);
        double event_time = now_ + dt;
        if (cfg_.stop.kind == StopRule::Kind::Time &&
            event_time > cfg_.stop.time_horizon) {
            accrue_dwell(now_, cfg_.stop.time_horizon, event_index_);
            now_ = cfg_.stop.time_horizon;
            return false;
        }
        accrue_dwell(now_, event_time, event_index_);
        now_ = event_time;

        const double pick = clock_.uniform() * total;
        EventKind kind;
        if (pick < rt_rate)
            kind = EventKind::RtArrival;
        else if (pick < rt_rate + nrt_rate)
            kind = EventKind::NrtArrival;
        else
            kind = EventKind::Service;

        const bool measured = measuring_event(event_index_, now_);
        BatchTally& tally =
            counters_.batches[measured ? batch_of_event(event_index_, now_) : 0];

        switch (kind) {
        case EventKind::RtArrival:
            apply_arrival(on_rt_arrival(before, cfg_.params, cfg_.scheme),
                          PacketClass::Rt, measured, tally);
            break;
        case EventKind::NrtArrival:
            apply_arrival(on_nrt_arrival(before, cfg_.params, cfg_.scheme),
                          PacketClass::Nrt, measured, tally);
            break;
        case EventKind::Service:
            apply_service(*service, measured, tally);
            break;
        }

        if (cfg_.trace)
            *cfg_.trace << now_ << ' ' << kind_name(kind) << " (" << before.rt << ','
                        << before.nrt << ") -> (" << state().rt << ','
                        << state().nrt << ")\n";

        ++event_index_;
        return true;
    }

    void apply_arrival(const ArrivalOutcome& outcome, PacketClass arriving,
                       bool measured, BatchTally& tally) {
        ClassCounters& cls = arriving == PacketClass::Rt ? counters_.rt : counters_.nrt;
        if (measured) {
            ++cls.arrivals;
            if (arriving == PacketClass::Rt)
                ++tally.rt_arrivals;
            else
                ++tally.nrt_arrivals;
        }

        switch (outcome.action) {
        case ArrivalAction::Block:
            if (measured) {
                ++cls.blocked;
                if (arriving == PacketClass::Rt)
                    ++tally.rt_lost;
                else
                    ++tally.nrt_lost;
            }
            break;
        case ArrivalAction::PushOut:
            evict_tail(outcome.victim, tally);
            [[fallthrough]];
        case ArrivalAction::Admit:
            queue_of(arriving).push_back({now_, measured});
            if (measured)
                ++cls.admitted;
            break;
        }
        check_state(outcome.next);
    }

    void evict_tail(PacketClass victim, BatchTally& tally) {
        std::deque<Packet>& queue = queue_of(victim);
        if (queue.empty())
            throw std::logic_error("push-out with no victim packet queued");
        const Packet packet = queue.back();
        queue.pop_back();
        if (!packet.measured)
            return;
        ClassCounters& cls =
            victim == PacketClass::Rt ? counters_.rt : counters_.nrt;
        ++cls.evicted;
        cls.sojourn_completed += now_ - packet.arrive_t;
        if (victim == PacketClass::Rt)
            ++tally.rt_lost;
        else
            ++tally.nrt_lost;
    }

    void apply_service(const ServiceOutcome& outcome, bool /*measured*/,
                       BatchTally& tally) {
        std::deque<Packet>& queue = queue_of(outcome.served);
        if (queue.empty())
            throw std::logic_error("service from an empty queue");
        const Packet packet = queue.front();
        queue.pop_front();
        if (packet.measured) {
            const double sojourn = now_ - packet.arrive_t;
            ClassCounters& cls =
                outcome.served == PacketClass::Rt ? counters_.rt : counters_.nrt;
            ++cls.served;
            cls.sojourn_served += sojourn;
            cls.sojourn_completed += sojourn;
            if (outcome.served == PacketClass::Rt) {
                ++tally.rt_served;
                tally.rt_sojourn += sojourn;
            } else {
                ++tally.nrt_served;
                tally.nrt_sojourn += sojourn;
            }
        }
        check_state(outcome.next);
    }

    std::deque<Packet>& queue_of(PacketClass cls) {
        return cls == PacketClass::Rt ? rt_q_ : nrt_q_;
    }

    void finish() {
        counters_.window_end = now_;
        if (!window_started_)
            counters_.window_start = now_;
        counters_.total_events = event_index_;
        for (const Packet& p : rt_q_)
            if (p.measured)
                ++counters_.rt.in_buffer_at_end;
        for (const Packet& p : nrt_q_)
            if (p.measured)
                ++counters_.nrt.in_buffer_at_end;
    }

    SimConfig cfg_;
    EventClock clock_;
    SimCounters counters_;
    std::deque<Packet> rt_q_;
    std::deque<Packet> nrt_q_;
    double now_ = 0.0;
    std::uint64_t event_index_ = 0;
    std::uint64_t warmup_events_ = 0;
    std::uint64_t measured_events_ = 0;
    double window_start_ = 0.0; ///< time-rule window start
    bool window_started_ = false;
};

} // namespace

SimCounters run_simulation(const SimConfig& config) {
    return SimulationRun(config).run();
}

namespace {

std::optional<double> batch_standard_error(const std::vector<double>& values) {
    const std::size_t k = values.size();
    if (k < 2)
        return std::nullopt;
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
}

} // namespace

SimQos qos_from_sim(const SimCounters& counters, const SystemParams& params) {
    if (!(counters.elapsed > 0))
        throw std::invalid_argument("empty measurement window");
    params.validate();

    SimQos out;
    out.qos.n_rt = counters.occ_rt_time / counters.elapsed;
    out.qos.n_nrt = counters.occ_nrt_time / counters.elapsed;

    const auto class_stats = [&](const ClassCounters& cls,
                                 std::optional<double>& loss,
                                 std::optional<double>& delay,
                                 std::optional<double>& delay_admitted) {
        if (cls.arrivals > 0)
            loss = static_cast<double>(cls.blocked + cls.evicted) /
                   static_cast<double>(cls.arrivals);
        if (cls.served > 0)
            delay = cls.sojourn_served / static_cast<double>(cls.served);
        if (cls.served + cls.evicted > 0)
            delay_admitted = cls.sojourn_completed /
                             static_cast<double>(cls.served + cls.evicted);
    };
    class_stats(counters.rt, out.qos.p_loss_rt, out.qos.d_rt, out.d_rt_admitted);
    class_stats(counters.nrt, out.qos.p_loss_nrt, out.qos.d_nrt, out.d_nrt_admitted);

    // Batch-means standard errors over the batches where the estimate is
    // defined.
    std::vector<double> values;
    const auto collect = [&](auto&& value_of) {
        values.clear();
        for (const BatchTally& b : counters.batches)
            if (auto v = value_of(b))
                values.push_back(*v);
        return batch_standard_error(values);
    };

    out.se_p_loss_rt = collect([](const BatchTally& b) -> std::optional<double> {
        if (b.rt_arrivals == 0)
            return std::nullopt;
        return static_cast<double>(b.rt_lost) / static_cast<double>(b.rt_arrivals);
    });
    out.se_p_loss_nrt = collect([](const BatchTally& b) -> std::optional<double> {
        if (b.nrt_arrivals == 0)
            return std::nullopt;
        return static_cast<double>(b.nrt_lost) / static_cast<double>(b.nrt_arrivals);
    });
    out.se_n_rt = collect([](const BatchTally& b) -> std::optional<double> {
        if (!(b.elapsed > 0))
            return std::nullopt;
        return b.occ_rt_time / b.elapsed;
    });
    out.se_n_nrt = collect([](const BatchTally& b) -> std::optional<double> {
        if (!(b.elapsed > 0))
            return std::nullopt;
        return b.occ_nrt_time / b.elapsed;
    });
    out.se_d_rt = collect([](const BatchTally& b) -> std::optional<double> {
        if (b.rt_served == 0)
            return std::nullopt;
        return b.rt_sojourn / static_cast<double>(b.rt_served);
    });
    out.se_d_nrt = collect([](const BatchTally& b) -> std::optional<double> {
        if (b.nrt_served == 0)
            return std::nullopt;
        return b.nrt_sojourn / static_cast<double>(b.nrt_served);
    });
    return out;
}

LittleLawGap little_law_gap(const SimCounters& counters) {
    LittleLawGap gap;
    if (!(counters.elapsed > 0))
        return gap;
    const auto gap_of = [&](const ClassCounters& cls,
                            double occ_time) -> std::optional<double> {
        const double occupancy = occ_time / counters.elapsed;
        const std::uint64_t completed = cls.served + cls.evicted;
        if (!(occupancy > 0) || completed == 0)
            return std::nullopt;
        const double admission_rate =
            static_cast<double>(cls.admitted) / counters.elapsed;
        const double mean_sojourn =
            cls.sojourn_completed / static_cast<double>(completed);
        return std::abs(occupancy - admission_rate * mean_sojourn) / occupancy;
    };
    gap.rt = gap_of(counters.rt, counters.occ_rt_time);
    gap.nrt = gap_of(counters.nrt, counters.occ_nrt_time);
    return gap;
}

} // namespace tspq
