// Keyed pseudorandom functions, binary-phase pseudorandom states, PRDMs
// obtained by tracing out trailing qubits, and the verifiable-PRDM construction.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prdm/qcore.hpp"
#include "prdm/rng.hpp"

namespace prdm::pseudostates {

/// A kappa-bit key. Bit i lives in byte i/8 at position i%8 (LSB first);
/// unused high bits of the last byte are always zero.
class Key {
public:
    Key(std::vector<std::uint8_t> bytes, int kappa);

    static Key random(int kappa, Rng& rng);
    /// Key whose bits are the binary expansion of `value` (kappa <= 64).
    static Key from_index(std::uint64_t value, int kappa);
    static Key zero(int kappa);
    /// Lowercase or uppercase hex, two digits per byte; kappa fixes the length.
    static Key from_hex(std::string_view hex, int kappa);

    int kappa() const { return kappa_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    bool bit(int i) const;
    /// Bits [offset, offset+width) as an integer, bit offset+j at position j.
    std::uint64_t bits(int offset, int width) const;
    std::string to_hex() const;

    friend bool operator==(const Key&, const Key&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    int kappa_;
};

enum class PrfKind {
    keyed_hash,        // one bit of a SipHash-2-4 digest
    kwise_polynomial,  // low bit of a degree-d polynomial over GF(2^w)
};

struct PrfSpec {
    PrfKind kind = PrfKind::keyed_hash;
    int degree = 7;
    int domain_bits = 1;

    static PrfSpec keyed_hash(int domain_bits);
    static PrfSpec polynomial(int domain_bits, int degree = 7);
    void validate() const;
};

std::string to_string(PrfKind kind);
PrfKind prf_kind_from_string(std::string_view s);

inline constexpr int kMaxFieldBits = 16;

/// Reduction polynomial (including the x^w term) used for GF(2^w).
std::uint32_t field_modulus(int w);
/// Carry-less product in GF(2^w) reduced by field_modulus(w).
std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, int w);

/// A PRF instance with its key material expanded once.
class Prf {
public:
    Prf(const Key& key, const PrfSpec& spec);

    const PrfSpec& spec() const { return spec_; }
    /// f_k(x) for x < 2^domain_bits.
    int operator()(std::uint64_t x) const;
    /// Polynomial coefficients (polynomial kind only), constant term first.
    const std::vector<std::uint32_t>& coefficients() const { return coeffs_; }

private:
    PrfSpec spec_;
    std::array<unsigned char, 16> sip_key_{};
    std::vector<std::uint32_t> coeffs_;
};

int prf_eval(const Key& key, const PrfSpec& spec, std::uint64_t x);

/// 64-bit keyed digest of (key, label, counter), used to derive note keys,
/// circuit angles and polynomial coefficients.
std::uint64_t keyed_digest(const Key& key, std::string_view label, std::uint64_t counter);

/// Signs (-1)^{f_k(x)} for every x in [0, 2^total_qubits).
std::vector<std::int8_t> binary_phase_signs(const Key& key, const PrfSpec& spec, int total_qubits);

/// |psi_k> = 2^{-N/2} sum_x (-1)^{f_k(x)} |x>, N = total_qubits = spec.domain_bits.
qcore::PureState binary_phase_state(const Key& key, const PrfSpec& spec, int total_qubits);

/// rho_{k,m} = tr_m |psi_k><psi_k| on n qubits. Built from integer sign sums
/// so that every diagonal entry is exactly 2^{-n}.
qcore::DensityMatrix make_prdm(const Key& key, const PrfSpec& spec, int n, int m);

/// Keyed brickwork circuit: each layer applies Rz Ry Rz rotations with
/// key-derived angles to every qubit, then CZ on alternating
/// nearest-neighbour pairs. depth 0 gives the identity.
qcore::ComplexMatrix keyed_random_circuit(const Key& key, int n, int depth);

/// U_k (|0><0|^{(x)(n-m)} (x) I_m/2^m) U_k^dagger.
qcore::DensityMatrix vprdm_make(const Key& key, int n, int m, int depth);

/// tr( |0><0|^{(x)(n-m)} tr_m(U_k^dagger rho U_k) ).
double vprdm_verify(const qcore::DensityMatrix& rho, const Key& key, int m, int depth);

}  // namespace prdm::pseudostates
