#include <tspq/policy.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace tspq {

void SystemParams::validate() const {
    if (capacity_n < 1)
        throw std::invalid_argument("capacity_n must be >= 1");
    if (threshold_r < 1 || threshold_r > capacity_n)
        throw std::invalid_argument("threshold_r must satisfy 0 < R <= N");
    for (double rate : {lambda_rt, lambda_nrt, mu_rt, mu_nrt})
        if (!std::isfinite(rate))
            throw std::invalid_argument("rates must be finite");
    if (lambda_rt < 0 || lambda_nrt < 0)
        throw std::invalid_argument("arrival rates must be >= 0");
    if (mu_rt <= 0 || mu_nrt <= 0)
        throw std::invalid_argument("service rates must be > 0");
}

StateSpace::StateSpace(int capacity_n) : capacity_(capacity_n) {
    if (capacity_n < 0)
        throw std::invalid_argument("capacity must be >= 0");
}

int StateSpace::index_of(const BufferState& s) const {
    if (!contains(s))
        throw std::out_of_range("state (" + std::to_string(s.rt) + "," +
                                std::to_string(s.nrt) + ") outside state space");
    const int level = s.total();
    return level * (level + 1) / 2 + s.nrt;
}

BufferState StateSpace::state_at(int index) const {
    if (index < 0 || index >= size())
        throw std::out_of_range("state index " + std::to_string(index) +
                                " outside [0, " + std::to_string(size()) + ")");
    // level = largest k with k(k+1)/2 <= index
    int level = static_cast<int>((std::sqrt(8.0 * index + 1.0) - 1.0) / 2.0);
    while (level * (level + 1) / 2 > index)
        --level;
    while ((level + 1) * (level + 2) / 2 <= index)
        ++level;
    const int nrt = index - level * (level + 1) / 2;
    return {level - nrt, nrt};
}

std::vector<BufferState> StateSpace::states() const {
    std::vector<BufferState> all;
    all.reserve(static_cast<std::size_t>(size()));
    for (int level = 0; level <= capacity_; ++level)
        for (int nrt = 0; nrt <= level; ++nrt)
            all.push_back({level - nrt, nrt});
    return all;
}

std::vector<BufferState> enumerate_states(const SystemParams& params) {
    params.validate();
    return StateSpace(params.capacity_n).states();
}

namespace {

void require_in_space(const BufferState& state, const SystemParams& params) {
    if (state.rt < 0 || state.nrt < 0 || state.total() > params.capacity_n)
        throw std::invalid_argument("state (" + std::to_string(state.rt) + "," +
                                    std::to_string(state.nrt) +
                                    ") outside state space for N=" +
                                    std::to_string(params.capacity_n));
}

} // namespace

ArrivalOutcome on_rt_arrival(const BufferState& state, const SystemParams& params,
                             SchemeKind scheme) {
    require_in_space(state, params);
    const int i = state.rt;
    const int j = state.nrt;
    const bool full = state.total() == params.capacity_n;

    if (scheme == SchemeKind::BTsp) {
        if (i < params.threshold_r && !full)
            return ArrivalOutcome::admit({i + 1, j});
        return ArrivalOutcome::block(state);
    }

    if (!full)
        return ArrivalOutcome::admit({i + 1, j});
    if (i < params.threshold_r)
        return ArrivalOutcome::push_out(PacketClass::Nrt, {i + 1, j - 1});
    return ArrivalOutcome::block(state);
}

ArrivalOutcome on_nrt_arrival(const BufferState& state, const SystemParams& params,
                              SchemeKind scheme) {
    require_in_space(state, params);
    const int i = state.rt;
    const int j = state.nrt;
    const bool full = state.total() == params.capacity_n;

    if (!full)
        return ArrivalOutcome::admit({i, j + 1});
    if (scheme == SchemeKind::EbTsp && i > params.threshold_r)
        return ArrivalOutcome::push_out(PacketClass::Rt, {i - 1, j + 1});
    return ArrivalOutcome::block(state);
}

std::optional<ServiceOutcome> on_service(const BufferState& state) {
    if (state.rt > 0)
        return ServiceOutcome{PacketClass::Rt, {state.rt - 1, state.nrt}};
    if (state.nrt > 0)
        return ServiceOutcome{PacketClass::Nrt, {state.rt, state.nrt - 1}};
    return std::nullopt;
}

} // namespace tspq
