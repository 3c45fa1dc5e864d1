#pragma once

#include <optional>
#include <vector>

#include <tspq/params.hpp>

namespace tspq {

enum class PacketClass {
    Rt,
    Nrt,
};

/// Canonical enumeration of the state space E = {(i, j) : i + j <= N}.
///
/// States are ordered by total occupancy, and within one occupancy level by
/// ascending NRT count, so index 0 is the empty buffer and the full-buffer
/// diagonal occupies the tail of the enumeration. The mapping between states
/// and indices is a bijection.
class StateSpace {
public:
    explicit StateSpace(int capacity_n);

    int capacity() const { return capacity_; }
    int size() const { return (capacity_ + 1) * (capacity_ + 2) / 2; }

    bool contains(const BufferState& s) const {
        return s.rt >= 0 && s.nrt >= 0 && s.total() <= capacity_;
    }

    /// Canonical index of a state; throws std::out_of_range for states
    /// outside E.
    int index_of(const BufferState& s) const;

    /// Inverse of index_of; throws std::out_of_range for invalid indices.
    BufferState state_at(int index) const;

    /// All states in canonical order.
    std::vector<BufferState> states() const;

private:
    int capacity_;
};

/// Convenience wrapper: the canonical state list for the given parameters.
std::vector<BufferState> enumerate_states(const SystemParams& params);

enum class ArrivalAction {
    Admit,   ///< packet enters, total occupancy +1
    PushOut, ///< packet enters a full buffer by evicting one of the other class
    Block,   ///< packet is rejected, state unchanged
};

/// Result of offering one arriving packet to the buffer.
struct ArrivalOutcome {
    ArrivalAction action = ArrivalAction::Block;
    BufferState next;         ///< successor state (equals the source on Block)
    PacketClass victim{};     ///< evicted class; meaningful only for PushOut

    static ArrivalOutcome admit(BufferState next) {
        return {ArrivalAction::Admit, next, PacketClass::Rt};
    }
    static ArrivalOutcome push_out(PacketClass victim, BufferState next) {
        return {ArrivalAction::PushOut, next, victim};
    }
    static ArrivalOutcome block(BufferState unchanged) {
        return {ArrivalAction::Block, unchanged, PacketClass::Rt};
    }
};

/// Offer an arriving RT packet to the buffer in `state`.
///
/// EbTsp: admit while space is free; at a full buffer an RT arrival pushes
/// out an NRT packet while the RT count is below the threshold, otherwise it
/// is blocked. BTsp: admit only while both the RT count is below the
/// threshold and space is free.
///
/// Throws std::invalid_argument if `state` lies outside E.
ArrivalOutcome on_rt_arrival(const BufferState& state, const SystemParams& params,
                             SchemeKind scheme);

/// Offer an arriving NRT packet to the buffer in `state`.
///
/// EbTsp: admit while space is free; at a full buffer an NRT arrival is
/// blocked while the RT count is at or below the threshold, and pushes out an
/// RT packet above it. BTsp: admit while space is free, never push out.
///
/// Throws std::invalid_argument if `state` lies outside E.
ArrivalOutcome on_nrt_arrival(const BufferState& state, const SystemParams& params,
                              SchemeKind scheme);

/// Class served next and the successor state.
struct ServiceOutcome {
    PacketClass served;
    BufferState next;
};

/// The single server always serves RT ahead of NRT: RT is served whenever
/// any RT packet is queued, NRT only from states with no RT packets, and an
/// empty buffer serves nothing. The service rate is mu_rt or mu_nrt of the
/// served class.
std::optional<ServiceOutcome> on_service(const BufferState& state);

} // namespace tspq
