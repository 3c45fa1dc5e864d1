// Test-only reference implementations, independent of the library's solver
// and metric paths: a dense brute-force stationary solve (Gaussian
// elimination with partial pivoting on the transposed balance equations) and
// M/M/1/K closed forms for the single-class reductions.

#pragma once

#include <vector>

#include <tspq/ctmc.hpp>

namespace tspq::test {

/// Solves p.Q = 0 with sum(p) = 1 as a dense linear system: transpose Q,
/// replace one equation by the normalization row, eliminate with partial
/// pivoting. Retries with a different replaced equation if the system comes
/// out singular.
std::vector<double> brute_force_stationary(const RateMatrix& q);

struct Mm1kResult {
    std::vector<double> pmf;   ///< occupancy distribution, size k+1
    double blocking;           ///< loss probability of an arrival
    double mean_number;        ///< mean packets in system
    double mean_sojourn;       ///< mean time in system of admitted packets
};

/// M/M/1/K closed forms (single class, one server, capacity k).
Mm1kResult mm1k(double lambda, double mu, int k);

} // namespace tspq::test
