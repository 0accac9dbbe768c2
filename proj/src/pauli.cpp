#include "prdm/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace prdm {

using qcore::Complex;
using qcore::ComplexMatrix;

namespace {

Complex i_power(int k) {
    switch (k & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

double parity_sign(std::uint64_t v) { return (std::popcount(v) & 1) ? -1.0 : 1.0; }

}  // namespace

PauliString PauliString::from_index(int num_qubits, std::uint64_t k) {
    if (num_qubits < 0 || num_qubits > 16) throw std::invalid_argument("PauliString: qubit count out of range");
    const std::uint64_t d = std::uint64_t{1} << num_qubits;
    if (k >= d * d) throw std::out_of_range("PauliString::from_index: index out of range");
    return {num_qubits, static_cast<std::uint32_t>(k / d), static_cast<std::uint32_t>(k % d)};
}

PauliString PauliString::parse(std::string_view letters) {
    PauliString p;
    p.num_qubits = static_cast<int>(letters.size());
    for (std::size_t q = 0; q < letters.size(); ++q) {
        const std::uint32_t bit = 1u << (letters.size() - 1 - q);
        switch (letters[q]) {
            case 'I': break;
            case 'X': p.x_bits |= bit; break;
            case 'Z': p.z_bits |= bit; break;
            case 'Y': p.x_bits |= bit; p.z_bits |= bit; break;
            default: throw std::invalid_argument("PauliString::parse: letters must be I, X, Y or Z");
        }
    }
    return p;
}

int PauliString::weight() const { return std::popcount(x_bits | z_bits); }

std::string PauliString::to_string() const {
    std::string s;
    for (int q = 0; q < num_qubits; ++q) {
        const std::uint32_t bit = 1u << (num_qubits - 1 - q);
        const bool x = x_bits & bit;
        const bool z = z_bits & bit;
        s.push_back(x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I'));
    }
    return s;
}

ComplexMatrix PauliString::matrix() const {
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(num_qubits));
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    const Complex phase = i_power(std::popcount(x_bits & z_bits));
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto ju = static_cast<std::uint64_t>(j);
        m(static_cast<Eigen::Index>(ju ^ x_bits), j) = phase * parity_sign(ju & z_bits);
    }
    return m;
}

double PauliString::expectation(const qcore::PureState& psi) const {
    if (psi.num_qubits() != num_qubits) throw std::invalid_argument("PauliString::expectation: dimension mismatch");
    const auto& v = psi.amplitudes();
    Complex acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const auto ju = static_cast<std::uint64_t>(j);
        acc += std::conj(v[static_cast<Eigen::Index>(ju ^ x_bits)]) * v[j] * parity_sign(ju & z_bits);
    }
    return (i_power(std::popcount(x_bits & z_bits)) * acc).real();
}

double PauliString::expectation(const qcore::DensityMatrix& rho) const {
    if (rho.num_qubits() != num_qubits) throw std::invalid_argument("PauliString::expectation: dimension mismatch");
    // tr(P rho) = sum_j P(j^x, j) rho(j, j^x)
    const auto& m = rho.matrix();
    Complex acc{0.0, 0.0};
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        const auto ju = static_cast<std::uint64_t>(j);
        acc += parity_sign(ju & z_bits) * m(j, static_cast<Eigen::Index>(ju ^ x_bits));
    }
    return (i_power(std::popcount(x_bits & z_bits)) * acc).real();
}

void PauliString::conjugate_into(const ComplexMatrix& rho, ComplexMatrix& out, double weight) const {
    // (P rho P)_{ij} = (-1)^{|(i^x)&z| + |(j^x)&z|} rho_{i^x, j^x}
    const Eigen::Index d = rho.rows();
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto jx = static_cast<std::uint64_t>(j) ^ x_bits;
        const double sj = parity_sign(jx & z_bits);
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto ix = static_cast<std::uint64_t>(i) ^ x_bits;
            out(i, j) += (weight * sj * parity_sign(ix & z_bits)) *
                         rho(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(jx));
        }
    }
}

}  // namespace prdm
