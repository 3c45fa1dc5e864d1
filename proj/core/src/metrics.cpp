#include <tspq/metrics.hpp>

#include <algorithm>
#include <stdexcept>

namespace tspq {

std::pair<double, double> loss_probabilities_closed_form(
    const StationaryDistribution& dist, const SystemParams& params) {
    if (!(params.lambda_rt > 0) || !(params.lambda_nrt > 0))
        throw std::invalid_argument(
            "closed-form losses need both arrival rates > 0");

    const int n = dist.space.capacity();
    const int r = params.threshold_r;

    double rt_blocked = 0.0;  // full buffer, i >= R
    double rt_evicted = 0.0;  // full buffer, i > R
    double nrt_blocked = 0.0; // full buffer, i <= R
    double nrt_evicted = 0.0; // full buffer, i < R
    for (int i = 0; i <= n; ++i) {
        const double p = dist.probability({i, n - i});
        if (i >= r)
            rt_blocked += p;
        if (i >= r + 1)
            rt_evicted += p;
        if (i <= r)
            nrt_blocked += p;
        if (i <= r - 1)
            nrt_evicted += p;
    }

    const double p_loss_rt =
        rt_blocked + params.lambda_nrt / params.lambda_rt * rt_evicted;
    const double p_loss_nrt =
        nrt_blocked + params.lambda_rt / params.lambda_nrt * nrt_evicted;
    return {p_loss_rt, p_loss_nrt};
}

LossProbabilities loss_probabilities_rate_based(const StationaryDistribution& dist,
                                                const SystemParams& params,
                                                SchemeKind scheme) {
    double rt_loss_flow = 0.0;  // blocked RT arrivals + evicted RT packets
    double nrt_loss_flow = 0.0;

    for (int idx = 0; idx < dist.space.size(); ++idx) {
        const double p = dist.probabilities[static_cast<std::size_t>(idx)];
        const BufferState s = dist.space.state_at(idx);

        if (params.lambda_rt > 0) {
            const ArrivalOutcome out = on_rt_arrival(s, params, scheme);
            if (out.action == ArrivalAction::Block)
                rt_loss_flow += params.lambda_rt * p;
            else if (out.action == ArrivalAction::PushOut)
                nrt_loss_flow += params.lambda_rt * p;
        }
        if (params.lambda_nrt > 0) {
            const ArrivalOutcome out = on_nrt_arrival(s, params, scheme);
            if (out.action == ArrivalAction::Block)
                nrt_loss_flow += params.lambda_nrt * p;
            else if (out.action == ArrivalAction::PushOut)
                rt_loss_flow += params.lambda_nrt * p;
        }
    }

    // Eviction flow never exceeds the admission flow, so each ratio is <= 1
    // mathematically; clip the last-ulp rounding excursions.
    LossProbabilities losses;
    if (params.lambda_rt > 0)
        losses.rt = std::min(rt_loss_flow / params.lambda_rt, 1.0);
    if (params.lambda_nrt > 0)
        losses.nrt = std::min(nrt_loss_flow / params.lambda_nrt, 1.0);
    return losses;
}

MeanOccupancy mean_occupancy(const StationaryDistribution& dist) {
    MeanOccupancy occ;
    for (int idx = 0; idx < dist.space.size(); ++idx) {
        const BufferState s = dist.space.state_at(idx);
        const double p = dist.probabilities[static_cast<std::size_t>(idx)];
        occ.rt += s.rt * p;
        occ.nrt += s.nrt * p;
    }
    return occ;
}

MeanDelays little_delays(const MeanOccupancy& occupancy,
                         const LossProbabilities& losses,
                         const SystemParams& params) {
    MeanDelays delays;
    if (losses.rt) {
        const double effective = params.lambda_rt * (1.0 - *losses.rt);
        if (effective > 0)
            delays.rt = occupancy.rt / effective;
    }
    if (losses.nrt) {
        const double effective = params.lambda_nrt * (1.0 - *losses.nrt);
        if (effective > 0)
            delays.nrt = (occupancy.rt + occupancy.nrt) / effective;
    }
    return delays;
}

QosReport analytic_qos(const StationaryDistribution& dist, const SystemParams& params,
                       SchemeKind scheme) {
    const LossProbabilities losses =
        loss_probabilities_rate_based(dist, params, scheme);
    const MeanOccupancy occupancy = mean_occupancy(dist);
    const MeanDelays delays = little_delays(occupancy, losses, params);
    return {losses.rt, losses.nrt, occupancy.rt, occupancy.nrt, delays.rt,
            delays.nrt};
}

} // namespace tspq
