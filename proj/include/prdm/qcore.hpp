// Dense state primitives: pure states, density matrices, partial trace,
// entropies and distances. All logarithms are base 2.
//
// Qubit ordering: qubit 0 is the most significant bit of a basis index, so a
// basis state |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + ... + q_{n-1}.
// Partial traces always remove the trailing block of qubits.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace prdm::qcore {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Structural invariants (Hermiticity, trace, norm).
inline constexpr double kStructuralTol = 1e-10;
// Derived equalities between two computed quantities.
inline constexpr double kDerivedTol = 1e-8;
// Smallest admissible eigenvalue of a density matrix.
inline constexpr double kPsdSlack = 1e-8;
// Eigenvalues below this are treated as zero in entropies.
inline constexpr double kEigenClamp = 1e-12;

inline constexpr int kDefaultMaxQubits = 14;

/// Upper bound on the total qubit count of any dense object. Thread-safe.
int max_total_qubits();
void set_max_total_qubits(int n);

/// Thrown when an operation would build a dense object larger than
/// max_total_qubits().
class LimitExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

void require_qubits_within_limit(int total_qubits, const char* what);

constexpr std::size_t dim_of(int num_qubits) { return std::size_t{1} << num_qubits; }

class PureState {
public:
    /// |0...0> on n qubits.
    explicit PureState(int num_qubits);
    /// Validates length 2^n and unit norm within kStructuralTol.
    PureState(int num_qubits, ComplexVector amplitudes);

    /// Normalizes an arbitrary nonzero vector of length 2^n.
    static PureState normalized(int num_qubits, ComplexVector v);
    static PureState basis(int num_qubits, std::size_t index);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const ComplexVector& amplitudes() const { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

    Complex inner(const PureState& other) const;  // <this|other>
    PureState tensor(const PureState& other) const;

private:
    int num_qubits_;
    ComplexVector amps_;
};

class DensityMatrix {
public:
    /// Validating constructor: checks Hermiticity, unit trace and PSD.
    static DensityMatrix from_matrix(int num_qubits, ComplexMatrix m);
    /// For operations whose output is a density matrix by construction.
    /// The invariants are only asserted in debug builds.
    static DensityMatrix from_trusted(int num_qubits, ComplexMatrix m);

    static DensityMatrix from_pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int num_qubits);
    static DensityMatrix basis_projector(int num_qubits, std::size_t index);
    static DensityMatrix diagonal(int num_qubits, std::span<const double> probs);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    /// Ascending eigenvalues of the Hermitian matrix.
    RealVector eigenvalues() const;

private:
    DensityMatrix(int num_qubits, ComplexMatrix m) : num_qubits_(num_qubits), m_(std::move(m)) {}

    int num_qubits_;
    ComplexMatrix m_;
};

/// Kronecker product; A occupies the leading qubits.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
/// rho^{(x)t}
DensityMatrix tensor_power(const DensityMatrix& rho, int t);

/// Keeps the leading `keep_leading` qubits, tracing out the rest.
DensityMatrix partial_trace(const DensityMatrix& rho, int keep_leading);
/// Partial trace of |psi><psi| without materializing the projector.
DensityMatrix partial_trace(const PureState& psi, int keep_leading);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// <psi|rho|psi> when at least one argument is pure. Throws
/// std::invalid_argument when neither argument is rank one.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double fidelity(const PureState& psi, const DensityMatrix& rho);

double von_neumann_entropy(const DensityMatrix& rho);
/// Entropy of a spectrum; entries are clamped to [0, 1] first.
double spectral_entropy(const RealVector& eigenvalues);
double purity(const DensityMatrix& rho);
bool is_pure(const DensityMatrix& rho, double tol = kStructuralTol);

/// Full dephasing in the computational basis.
DensityMatrix dephase(const DensityMatrix& rho);

/// Throws std::invalid_argument unless entries are >= 0 and sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> p);

/// max_ij |a_ij - b_ij|
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_unitary(const ComplexMatrix& u, double tol);

/// Conjugation U rho U^dagger; U must be square with matching dimension.
DensityMatrix conjugate(const ComplexMatrix& u, const DensityMatrix& rho);

/// Bipartition of n_A + n_B qubits; A is the leading block.
struct Bipartition {
    int n_a;
    int n_b;

    Bipartition(int n_a_, int n_b_);
    int total() const { return n_a + n_b; }
};

}  // namespace prdm::qcore
