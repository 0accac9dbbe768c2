// Resource monotones: coherence, a hashing lower bound on distillable
// entanglement, and magic (stabilizer fidelity, stabilizer 2-Renyi entropy,
// robustness of magic). All values are in bits.

#pragma once

#include <filesystem>
#include <vector>

#include "prdm/pauli.hpp"
#include "prdm/qcore.hpp"
#include "prdm/simplex.hpp"

namespace prdm::monotones {

inline constexpr int kMaxStabilizerQubits = 3;
inline constexpr int kMaxRenyiQubits = 8;

/// 2^n prod_{k=1..n} (2^k + 1)
std::size_t stabilizer_count(int n);

struct StabilizerStateSet {
    int num_qubits = 0;
    /// One representative per state; the first nonzero amplitude is real positive.
    std::vector<qcore::PureState> states;
};

/// Breadth-first orbit of |0...0> under H, S and CNOT. n in [1, 3].
StabilizerStateSet enumerate_stabilizer_states(int n);

/// Text cache: a "prdm-stabilizer-set v1 <n> <count>" header, then one line
/// per state listing 2^n "re im" pairs in fixed-point decimal.
void save_stabilizer_cache(const StabilizerStateSet& set, const std::filesystem::path& path);
/// Throws std::runtime_error on a missing file, bad header or wrong count.
StabilizerStateSet load_stabilizer_cache(const std::filesystem::path& path);
/// Loads the cache if it is valid for n, otherwise enumerates and writes it.
StabilizerStateSet stabilizer_states_cached(int n, const std::filesystem::path& path);

/// max_phi |<psi|phi>|^2
double stabilizer_fidelity(const qcore::PureState& psi, const StabilizerStateSet& stab);

/// -log2( d^{-1} sum_P <psi|P|psi>^4 ), d = 2^{#qubits}; zero on stabilizer states.
double stabilizer_renyi_2(const qcore::PureState& psi);

struct LpSolution {
    lp::Status status = lp::Status::iteration_limit;
    /// c_phi, one per stabilizer state, with rho = sum_phi c_phi |phi><phi|.
    std::vector<double> coefficients;
    /// R(rho) = sum_phi |c_phi|
    double objective = 0.0;
    /// Dual witness A (Hermitian) with |tr(A phi)| <= 1 on every stabilizer
    /// state; tr(A rho) is a lower bound on R.
    qcore::ComplexMatrix witness;
    double dual_value = 0.0;
    int iterations = 0;

    double log_robustness() const;
};

/// L1-minimal stabilizer decomposition, solved as a linear program over the
/// Pauli expectation values (one equality per Pauli string).
LpSolution robustness_of_magic(const qcore::DensityMatrix& rho, const StabilizerStateSet& stab,
                               const lp::Options& options = lp::degenerate_options());

/// Lower bound tr(A rho) / max_phi |tr(A phi)| from any Hermitian witness A.
double witness_bound(const qcore::ComplexMatrix& a, const qcore::DensityMatrix& rho,
                     const StabilizerStateSet& stab);

/// max_phi |sum_phi c_phi phi - rho|_ij, the reconstruction error of a decomposition.
double decomposition_residual(const LpSolution& sol, const qcore::DensityMatrix& rho,
                              const StabilizerStateSet& stab);

/// -log2 F_STAB(psi) - 2m, a lower bound on LR of the reduced state of psi
/// after tracing out its trailing m qubits. `stab` covers all of psi.
double lr_lower_bound_from_purification(const qcore::PureState& psi, int m, const StabilizerStateSet& stab);

/// S(Delta[rho]) - S(rho)
double relative_entropy_coherence(const qcore::DensityMatrix& rho);

struct HashingBound {
    double raw = 0.0;        // S(rho_A) - S(rho)
    double certified = 0.0;  // max(0, raw)
};

HashingBound hashing_entanglement_bound(const qcore::DensityMatrix& rho, const qcore::Bipartition& cut);

}  // namespace prdm::monotones
