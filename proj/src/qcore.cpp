#include "prdm/qcore.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <string>

namespace prdm::qcore {

namespace {

std::atomic<int> g_max_qubits{kDefaultMaxQubits};

bool entries_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

double hermiticity_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

[[maybe_unused]] bool debug_invariants_hold(const ComplexMatrix& m) {
    if (m.rows() > 256) return true;
    if (hermiticity_defect(m) > kStructuralTol) return false;
    if (std::abs(m.trace() - Complex{1.0, 0.0}) > kStructuralTol) return false;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -kPsdSlack;
}

}  // namespace

int max_total_qubits() { return g_max_qubits.load(std::memory_order_relaxed); }

void set_max_total_qubits(int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("max total qubits must lie in [1, 20]");
    g_max_qubits.store(n, std::memory_order_relaxed);
}

void require_qubits_within_limit(int total_qubits, const char* what) {
    if (total_qubits > max_total_qubits()) {
        throw LimitExceeded(std::string(what) + ": " + std::to_string(total_qubits) +
                            " qubits exceeds the dense limit of " +
                            std::to_string(max_total_qubits()));
    }
}

// ---------------------------------------------------------------- PureState

PureState::PureState(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 0) throw std::invalid_argument("PureState: negative qubit count");
    require_qubits_within_limit(num_qubits, "PureState");
    amps_ = ComplexVector::Zero(static_cast<Eigen::Index>(dim_of(num_qubits)));
    amps_[0] = 1.0;
}

PureState::PureState(int num_qubits, ComplexVector amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits < 0) throw std::invalid_argument("PureState: negative qubit count");
    require_qubits_within_limit(num_qubits, "PureState");
    if (static_cast<std::size_t>(amps_.size()) != dim_of(num_qubits)) {
        throw std::invalid_argument("PureState: amplitude vector length is not 2^n");
    }
    if (!amps_.allFinite()) throw std::invalid_argument("PureState: non-finite amplitude");
    if (std::abs(amps_.norm() - 1.0) > kStructuralTol) {
        throw std::invalid_argument("PureState: amplitudes are not normalized");
    }
}

PureState PureState::normalized(int num_qubits, ComplexVector v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("PureState: cannot normalize a zero or non-finite vector");
    }
    v /= norm;
    return PureState(num_qubits, std::move(v));
}

PureState PureState::basis(int num_qubits, std::size_t index) {
    PureState s(num_qubits);
    if (index >= s.dim()) throw std::out_of_range("PureState::basis: index out of range");
    s.amps_[0] = 0.0;
    s.amps_[static_cast<Eigen::Index>(index)] = 1.0;
    return s;
}

Complex PureState::inner(const PureState& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("inner: dimension mismatch");
    return amps_.dot(other.amps_);  // conjugates the first argument
}

PureState PureState::tensor(const PureState& other) const {
    const int total = num_qubits_ + other.num_qubits_;
    require_qubits_within_limit(total, "PureState::tensor");
    ComplexVector out(static_cast<Eigen::Index>(dim_of(total)));
    const auto db = static_cast<Eigen::Index>(other.dim());
    for (Eigen::Index a = 0; a < amps_.size(); ++a) {
        out.segment(a * db, db) = amps_[a] * other.amps_;
    }
    return PureState::normalized(total, std::move(out));
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix DensityMatrix::from_matrix(int num_qubits, ComplexMatrix m) {
    if (num_qubits < 0) throw std::invalid_argument("DensityMatrix: negative qubit count");
    require_qubits_within_limit(num_qubits, "DensityMatrix");
    const auto d = static_cast<Eigen::Index>(dim_of(num_qubits));
    if (m.rows() != d || m.cols() != d) {
        throw std::invalid_argument("DensityMatrix: matrix is not 2^n x 2^n");
    }
    if (!entries_finite(m)) throw std::invalid_argument("DensityMatrix: non-finite entry");
    if (hermiticity_defect(m) > kStructuralTol) {
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(m.trace() - Complex{1.0, 0.0}) > kStructuralTol) {
        throw std::invalid_argument("DensityMatrix: trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdSlack) {
        throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
    }
    return DensityMatrix(num_qubits, std::move(m));
}

DensityMatrix DensityMatrix::from_trusted(int num_qubits, ComplexMatrix m) {
    assert(m.rows() == static_cast<Eigen::Index>(dim_of(num_qubits)));
    assert(debug_invariants_hold(m));
    return DensityMatrix(num_qubits, std::move(m));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    const auto& v = psi.amplitudes();
    return DensityMatrix(psi.num_qubits(), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    require_qubits_within_limit(num_qubits, "maximally_mixed");
    const auto d = static_cast<Eigen::Index>(dim_of(num_qubits));
    return DensityMatrix(num_qubits, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::basis_projector(int num_qubits, std::size_t index) {
    return from_pure(PureState::basis(num_qubits, index));
}

DensityMatrix DensityMatrix::diagonal(int num_qubits, std::span<const double> probs) {
    require_qubits_within_limit(num_qubits, "DensityMatrix::diagonal");
    if (probs.size() != dim_of(num_qubits)) {
        throw std::invalid_argument("DensityMatrix::diagonal: length is not 2^n");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("DensityMatrix::diagonal: negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > kStructuralTol) {
        throw std::invalid_argument("DensityMatrix::diagonal: entries do not sum to 1");
    }
    const auto d = static_cast<Eigen::Index>(probs.size());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = probs[static_cast<std::size_t>(i)];
    return DensityMatrix(num_qubits, std::move(m));
}

RealVector DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// --------------------------------------------------------------- operations

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    const int total = a.num_qubits() + b.num_qubits();
    require_qubits_within_limit(total, "tensor");
    const auto da = static_cast<Eigen::Index>(a.dim());
    const auto db = static_cast<Eigen::Index>(b.dim());
    ComplexMatrix out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
        }
    }
    return DensityMatrix::from_trusted(total, std::move(out));
}

DensityMatrix tensor_power(const DensityMatrix& rho, int t) {
    if (t < 1) throw std::invalid_argument("tensor_power: t must be >= 1");
    require_qubits_within_limit(rho.num_qubits() * t, "tensor_power");
    DensityMatrix out = rho;
    for (int k = 1; k < t; ++k) out = tensor(out, rho);
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep_leading) {
    const int n = rho.num_qubits();
    if (keep_leading < 1 || keep_leading > n) {
        throw std::out_of_range("partial_trace: kept qubit count must lie in [1, n]");
    }
    const auto da = static_cast<Eigen::Index>(dim_of(keep_leading));
    const auto db = static_cast<Eigen::Index>(dim_of(n - keep_leading));
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    const ComplexMatrix& m = rho.matrix();
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            out(i, j) = m.block(i * db, j * db, db, db).trace();
        }
    }
    return DensityMatrix::from_trusted(keep_leading, std::move(out));
}

DensityMatrix partial_trace(const PureState& psi, int keep_leading) {
    const int n = psi.num_qubits();
    if (keep_leading < 1 || keep_leading > n) {
        throw std::out_of_range("partial_trace: kept qubit count must lie in [1, n]");
    }
    const auto da = static_cast<Eigen::Index>(dim_of(keep_leading));
    const auto db = static_cast<Eigen::Index>(dim_of(n - keep_leading));
    // Column-major map of the amplitudes as a db x da matrix has entry
    // (b, a) = psi[a*db + b]; its transpose is the da x db coefficient matrix.
    Eigen::Map<const ComplexMatrix> coeffs_t(psi.amplitudes().data(), db, da);
    const ComplexMatrix coeffs = coeffs_t.transpose();
    return DensityMatrix::from_trusted(keep_leading, coeffs * coeffs.adjoint());
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
    const ComplexMatrix diff = a.matrix() - b.matrix();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

bool is_pure(const DensityMatrix& rho, double tol) {
    return std::abs(purity(rho) - 1.0) <= tol;
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    if (!is_pure(a, 1e-9) && !is_pure(b, 1e-9)) {
        throw std::invalid_argument("fidelity: at least one argument must be a pure state");
    }
    // For a rank-one argument |psi><psi|, tr(a b) = <psi|b|psi>.
    const Complex overlap = (a.matrix().cwiseProduct(b.matrix().conjugate())).sum();
    return std::clamp(overlap.real(), 0.0, 1.0);
}

double fidelity(const PureState& psi, const DensityMatrix& rho) {
    if (psi.dim() != rho.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    const auto& v = psi.amplitudes();
    const Complex f = v.dot(rho.matrix() * v);
    return std::clamp(f.real(), 0.0, 1.0);
}

double spectral_entropy(const RealVector& eigenvalues) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double lam = std::clamp(eigenvalues[i], 0.0, 1.0);
        if (lam > kEigenClamp) s -= lam * std::log2(lam);
    }
    return std::max(s, 0.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
    return spectral_entropy(rho.eigenvalues());
}

double purity(const DensityMatrix& rho) {
    // tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
    return rho.matrix().squaredNorm();
}

DensityMatrix dephase(const DensityMatrix& rho) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    out.diagonal() = rho.matrix().diagonal().real().cast<Complex>();
    return DensityMatrix::from_trusted(rho.num_qubits(), std::move(out));
}

double shannon_entropy(std::span<const double> p) {
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw std::invalid_argument("shannon_entropy: negative or NaN entry");
        total += x;
    }
    if (p.empty() || std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("shannon_entropy: probabilities do not sum to 1");
    }
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    return std::max(h, 0.0);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    const ComplexMatrix id = ComplexMatrix::Identity(u.rows(), u.cols());
    return max_abs_diff(u.adjoint() * u, id) <= tol;
}

DensityMatrix conjugate(const ComplexMatrix& u, const DensityMatrix& rho) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    if (u.rows() != d || u.cols() != d) throw std::invalid_argument("conjugate: dimension mismatch");
    ComplexMatrix out = u * rho.matrix() * u.adjoint();
    // Re-symmetrize to keep rounding from breaking Hermiticity checks downstream.
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix::from_trusted(rho.num_qubits(), std::move(out));
}

Bipartition::Bipartition(int n_a_, int n_b_) : n_a(n_a_), n_b(n_b_) {
    if (n_a < 1 || n_b < 1) throw std::invalid_argument("Bipartition: both sides need >= 1 qubit");
}

}  // namespace prdm::qcore
