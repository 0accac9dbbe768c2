// Unital noise channels: depolarizing (global and local), dephasing and
// general mixed-unitary channels, plus Kraus channels for counterexamples.

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "prdm/pauli.hpp"
#include "prdm/qcore.hpp"

namespace prdm::channels {

struct MixedUnitaryTerm {
    double probability = 0.0;
    qcore::ComplexMatrix unitary;
    /// Set when the unitary is a Pauli string; enables O(d^2) application.
    std::optional<PauliString> pauli;
};

/// Phi(rho) = sum_i p_i U_i rho U_i^dagger
class MixedUnitaryChannel {
public:
    MixedUnitaryChannel(int num_qubits, std::vector<MixedUnitaryTerm> terms);

    int num_qubits() const { return num_qubits_; }
    const std::vector<MixedUnitaryTerm>& terms() const { return terms_; }
    std::vector<double> probabilities() const;

private:
    int num_qubits_;
    std::vector<MixedUnitaryTerm> terms_;
};

/// rho -> sum_i K_i rho K_i^dagger with sum_i K_i^dagger K_i = I.
class KrausChannel {
public:
    KrausChannel(int num_qubits, std::vector<qcore::ComplexMatrix> kraus_ops);

    int num_qubits() const { return num_qubits_; }
    const std::vector<qcore::ComplexMatrix>& kraus_ops() const { return ops_; }

private:
    int num_qubits_;
    std::vector<qcore::ComplexMatrix> ops_;
};

/// (1-p) rho + p I/2^n
struct GlobalDepolarizing {
    int num_qubits;
    double p;
};

/// Single-qubit depolarizing with parameter p on every qubit, applied
/// qubit by qubit (the factored path; valid up to the dense limit).
struct LocalDepolarizing {
    int num_qubits;
    double p;
};

using Channel = std::variant<MixedUnitaryChannel, KrausChannel, GlobalDepolarizing, LocalDepolarizing>;

int num_qubits(const Channel& channel);

qcore::DensityMatrix apply(const MixedUnitaryChannel& channel, const qcore::DensityMatrix& rho);
qcore::DensityMatrix apply(const KrausChannel& channel, const qcore::DensityMatrix& rho);
qcore::DensityMatrix apply(const GlobalDepolarizing& channel, const qcore::DensityMatrix& rho);
qcore::DensityMatrix apply(const LocalDepolarizing& channel, const qcore::DensityMatrix& rho);
qcore::DensityMatrix apply(const Channel& channel, const qcore::DensityMatrix& rho);

MixedUnitaryChannel identity_channel(int n);

GlobalDepolarizing depolarizing_global(int n, double p);

inline constexpr int kMaxExplicitLocalQubits = 6;

/// Explicit 4^n-term expansion with product probabilities
/// {1-3p/4, p/4, p/4, p/4}^{(x)n}; zero-probability terms are dropped.
MixedUnitaryChannel depolarizing_local(int n, double p);
LocalDepolarizing depolarizing_local_factored(int n, double p);

/// Uniform mixture of the 2^n Z-type Pauli strings; equals qcore::dephase.
MixedUnitaryChannel dephasing_channel(int n);

/// Single-qubit amplitude damping, a non-unital Kraus pair.
KrausChannel amplitude_damping(double gamma);

/// Shannon entropy (bits) of the mixing probabilities.
double channel_entropy(const MixedUnitaryChannel& channel);
/// n * H({1-3p/4, p/4, p/4, p/4}) without building the 4^n terms.
double local_depolarizing_entropy(int n, double p);
/// H({1-3p/4, p/4, p/4, p/4})
double single_qubit_depolarizing_entropy(double p);

/// True iff the channel maps I/2^n to I/2^n within `tolerance`.
bool is_unital(const Channel& channel, double tolerance = 1e-10);

}  // namespace prdm::channels
