#pragma once

#include <cstdint>
#include <string>

#include "prdm/qcore.hpp"

namespace prdm {

/// Unsigned Pauli string P = i^{|x & z|} X^x Z^z, which is Hermitian.
///
/// Masks use basis-index bit positions: bit b acts on qubit n-1-b, matching
/// the qubit-0-most-significant convention of qcore.
struct PauliString {
    int num_qubits = 0;
    std::uint32_t x_bits = 0;
    std::uint32_t z_bits = 0;

    /// The k-th of the 4^n strings; k = x_bits * 2^n + z_bits.
    static PauliString from_index(int num_qubits, std::uint64_t k);
    /// From letters I, X, Y, Z; the first letter acts on qubit 0.
    static PauliString parse(std::string_view letters);

    int weight() const;
    bool is_identity() const { return x_bits == 0 && z_bits == 0; }
    std::string to_string() const;
    qcore::ComplexMatrix matrix() const;

    /// <psi|P|psi>, real for Hermitian P.
    double expectation(const qcore::PureState& psi) const;
    /// tr(P rho).
    double expectation(const qcore::DensityMatrix& rho) const;

    /// P rho P written into `out` (same size as rho).
    void conjugate_into(const qcore::ComplexMatrix& rho, qcore::ComplexMatrix& out, double weight) const;

    friend bool operator==(const PauliString&, const PauliString&) = default;
};

}  // namespace prdm
