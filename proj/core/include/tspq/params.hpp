#pragma once

namespace tspq {

/// Buffer management discipline for the shared RT/NRT buffer.
///
/// EbTsp: RT packets may occupy space beyond the threshold while the buffer
/// has room; at a full buffer, arrivals may push out a queued packet of the
/// other class depending on the current RT count relative to the threshold.
/// BTsp: RT occupancy is hard-capped at the threshold and nothing is ever
/// pushed out.
enum class SchemeKind {
    EbTsp,
    BTsp,
};

/// Model parameters for one buffer: capacity, RT threshold and the four
/// exponential rates. All rates are in packets per unit time; no particular
/// unit is imposed.
struct SystemParams {
    int capacity_n = 0;      ///< total buffer capacity N (packets)
    int threshold_r = 0;     ///< RT threshold R, 0 < R <= N
    double lambda_rt = 0.0;  ///< RT arrival rate
    double lambda_nrt = 0.0; ///< NRT arrival rate
    double mu_rt = 0.0;      ///< RT service rate, > 0
    double mu_nrt = 0.0;     ///< NRT service rate, > 0

    /// Throws std::invalid_argument if any invariant is violated
    /// (capacity/threshold ordering, rate signs, non-finite values).
    void validate() const;
};

/// Buffer occupancy (i, j) = (#RT packets, #NRT packets).
struct BufferState {
    int rt = 0;
    int nrt = 0;

    int total() const { return rt + nrt; }
    friend bool operator==(const BufferState&, const BufferState&) = default;
};

} // namespace tspq
