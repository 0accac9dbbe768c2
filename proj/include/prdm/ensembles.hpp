// Haar random pure states, the generalized Hilbert-Schmidt ensemble (GHSE)
// and exact t-copy moments of both.

#pragma once

#include <cstdint>
#include <vector>

#include "prdm/qcore.hpp"
#include "prdm/rng.hpp"

namespace prdm::ensembles {

/// n visible qubits of an (n+m)-qubit Haar state; m is the mixedness.
struct GhseParams {
    int n = 1;
    int m = 0;

    GhseParams(int n_, int m_);
    int total() const { return n + m; }
};

qcore::PureState sample_haar_state(int n, RngSeed seed);
qcore::PureState sample_haar_state(int n, Rng& rng);

/// rho = X X^dagger / tr(X X^dagger) with X a 2^n x 2^m complex Ginibre matrix.
qcore::DensityMatrix sample_ghse(const GhseParams& params, RngSeed seed);
qcore::DensityMatrix sample_ghse(const GhseParams& params, Rng& rng);

/// Haar-random unitary of dimension 2^n (QR of a Ginibre matrix with the
/// phases of R's diagonal divided out).
qcore::ComplexMatrix sample_haar_unitary(int n, Rng& rng);

// Permutations of t tensor factors. A permutation is stored as its image
// list: perm[k] is where factor k is sent.
using Permutation = std::vector<int>;

int cycle_count(const Permutation& perm);
std::vector<Permutation> all_permutations(int t);

/// Basis-index map of the operator that permutes t blocks of n qubits:
/// the operator sends basis state j to basis state result[j].
std::vector<std::size_t> permutation_index_map(const Permutation& perm, int n);
/// The same operator as an explicit 0/1 matrix (small cases and tests).
qcore::ComplexMatrix permutation_operator(const Permutation& perm, int n);

inline constexpr int kMaxMomentCopies = 6;

/// E[rho^{(x)t}] over the (n, m) GHSE:
///   (D-1)!/(D+t-1)! * sum_{pi in S_t} d_B^{cycles(pi)} pi_A,  D = d_A d_B.
qcore::DensityMatrix ghse_moment_exact(const GhseParams& params, int t);

/// E[|psi><psi|^{(x)t}] over Haar states; the m = 0 case of the above.
qcore::DensityMatrix haar_moment_exact(int n, int t);

/// Trace distance between the exact GHSE t-copy moment and (I/2^n)^{(x)t}.
double td_ghse_to_mixed(const GhseParams& params, int t);

/// Closed-form envelope used to certify td_ghse_to_mixed:
///   t(t-1)/(2*2^m) * (1 + 2^{-n-1}) + 2 t^4 / 2^{2m}.
/// The leading term is the analytic expansion; the remainder constant 2 is
/// an explicit choice validated against exact values.
double td_envelope(const GhseParams& params, int t);

/// E tr(rho_A^2) for the leading n_A qubits of a GHSE state:
///   (2^{n_A} + 2^{n+m-n_A}) / (2^{n+m} + 1).
double expected_subsystem_purity(const GhseParams& params, int n_a);

/// E tr(Delta[rho]^2) = (2^m + 1) / (2^{n+m} + 1).
double expected_diagonal_purity(const GhseParams& params);

}  // namespace prdm::ensembles
