#include "prdm/monotones.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace prdm::monotones {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::ComplexVector;
using qcore::DensityMatrix;
using qcore::PureState;

namespace {

constexpr const char* kCacheMagic = "prdm-stabilizer-set";
constexpr int kCacheVersion = 1;

void require_stabilizer_range(int n, const char* what) {
    if (n < 1 || n > kMaxStabilizerQubits) {
        throw std::invalid_argument(std::string(what) + ": qubit count must lie in [1, 3]");
    }
}

// Multiplies by the conjugate phase of the first nonzero amplitude.
ComplexVector phase_canonical(const ComplexVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-6) return v * (std::conj(v[i]) / std::abs(v[i]));
    }
    return v;
}

std::vector<long long> grid_key(const ComplexVector& v) {
    std::vector<long long> key;
    key.reserve(static_cast<std::size_t>(2 * v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        key.push_back(std::llround(v[i].real() * 1e8));
        key.push_back(std::llround(v[i].imag() * 1e8));
    }
    return key;
}

ComplexVector apply_h(const ComplexVector& v, int n, int q) {
    const auto bit = static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - q));
    ComplexVector out = v;
    const double s = std::numbers::sqrt2 / 2.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i & bit) continue;
        out[i] = s * (v[i] + v[i | bit]);
        out[i | bit] = s * (v[i] - v[i | bit]);
    }
    return out;
}

ComplexVector apply_s(const ComplexVector& v, int n, int q) {
    const auto bit = static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - q));
    ComplexVector out = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i & bit) out[i] *= Complex{0.0, 1.0};
    }
    return out;
}

ComplexVector apply_cnot(const ComplexVector& v, int n, int control, int target) {
    const auto cbit = static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - control));
    const auto tbit = static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - target));
    ComplexVector out = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i & cbit) out[i] = v[i ^ tbit];
    }
    return out;
}

double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-12 ? r : v;
}

}  // namespace

std::size_t stabilizer_count(int n) {
    if (n < 0 || n > 16) throw std::invalid_argument("stabilizer_count: qubit count out of range");
    std::size_t count = std::size_t{1} << n;
    for (int k = 1; k <= n; ++k) count *= (std::size_t{1} << k) + 1;
    return count;
}

StabilizerStateSet enumerate_stabilizer_states(int n) {
    require_stabilizer_range(n, "enumerate_stabilizer_states");
    StabilizerStateSet set;
    set.num_qubits = n;

    std::set<std::vector<long long>> seen;
    std::deque<ComplexVector> queue;
    ComplexVector start = ComplexVector::Zero(static_cast<Eigen::Index>(qcore::dim_of(n)));
    start[0] = 1.0;
    seen.insert(grid_key(start));
    queue.push_back(start);

    auto visit = [&](const ComplexVector& v) {
        ComplexVector c = phase_canonical(v);
        if (seen.insert(grid_key(c)).second) queue.push_back(std::move(c));
    };

    while (!queue.empty()) {
        ComplexVector v = std::move(queue.front());
        queue.pop_front();
        for (int q = 0; q < n; ++q) {
            visit(apply_h(v, n, q));
            visit(apply_s(v, n, q));
        }
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a != b) visit(apply_cnot(v, n, a, b));
            }
        }
        set.states.push_back(PureState::normalized(n, std::move(v)));
    }
    if (set.states.size() != stabilizer_count(n)) {
        throw std::logic_error("enumerate_stabilizer_states: orbit size does not match the stabilizer count");
    }
    return set;
}

void save_stabilizer_cache(const StabilizerStateSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write stabilizer cache " + path.string());
    out << kCacheMagic << " v" << kCacheVersion << ' ' << set.num_qubits << ' ' << set.states.size() << '\n';
    out << std::fixed << std::setprecision(17);
    for (const auto& s : set.states) {
        const auto& a = s.amplitudes();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (i) out << ' ';
            out << a[i].real() << ' ' << a[i].imag();
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing stabilizer cache " + path.string());
}

StabilizerStateSet load_stabilizer_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stabilizer cache " + path.string());
    std::string magic, version;
    int n = 0;
    std::size_t count = 0;
    if (!(in >> magic >> version >> n >> count) || magic != kCacheMagic ||
        version != "v" + std::to_string(kCacheVersion)) {
        throw std::runtime_error("stabilizer cache has an unrecognized header");
    }
    require_stabilizer_range(n, "load_stabilizer_cache");
    if (count != stabilizer_count(n)) throw std::runtime_error("stabilizer cache has the wrong state count");

    StabilizerStateSet set;
    set.num_qubits = n;
    set.states.reserve(count);
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    for (std::size_t k = 0; k < count; ++k) {
        ComplexVector v(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            double re = 0.0, im = 0.0;
            if (!(in >> re >> im)) throw std::runtime_error("stabilizer cache is truncated");
            v[i] = {re, im};
        }
        set.states.emplace_back(n, std::move(v));
    }
    return set;
}

StabilizerStateSet stabilizer_states_cached(int n, const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        try {
            auto set = load_stabilizer_cache(path);
            if (set.num_qubits == n) return set;
        } catch (const std::runtime_error&) {
            // Stale or corrupt cache: fall through and rebuild it.
        }
    }
    auto set = enumerate_stabilizer_states(n);
    save_stabilizer_cache(set, path);
    return set;
}

double stabilizer_fidelity(const PureState& psi, const StabilizerStateSet& stab) {
    if (psi.num_qubits() != stab.num_qubits) throw std::invalid_argument("stabilizer_fidelity: dimension mismatch");
    double best = 0.0;
    for (const auto& phi : stab.states) best = std::max(best, std::norm(phi.inner(psi)));
    return best;
}

double stabilizer_renyi_2(const PureState& psi) {
    const int n = psi.num_qubits();
    if (n > kMaxRenyiQubits) throw qcore::LimitExceeded("stabilizer_renyi_2: at most 8 qubits");
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    double sum = 0.0;
    for (std::uint64_t k = 0; k < count; ++k) {
        const double e = PauliString::from_index(n, k).expectation(psi);
        const double e2 = e * e;
        sum += e2 * e2;
    }
    const double value = -std::log2(sum / static_cast<double>(qcore::dim_of(n)));
    return std::max(0.0, value);
}

double LpSolution::log_robustness() const { return std::log2(objective); }

LpSolution robustness_of_magic(const DensityMatrix& rho, const StabilizerStateSet& stab, const lp::Options& options) {
    const int n = rho.num_qubits();
    if (n != stab.num_qubits) throw std::invalid_argument("robustness_of_magic: dimension mismatch");
    require_stabilizer_range(n, "robustness_of_magic");

    const auto paulis = static_cast<Eigen::Index>(std::size_t{1} << (2 * n));
    const auto states = static_cast<Eigen::Index>(stab.states.size());

    // Row P: sum_phi (c+ - c-) <phi|P|phi> = tr(P rho). The identity row fixes sum c = 1.
    lp::Problem prob;
    prob.a.resize(paulis, 2 * states);
    prob.b.resize(paulis);
    prob.c = Eigen::VectorXd::Ones(2 * states);
    for (Eigen::Index k = 0; k < paulis; ++k) {
        const auto p = PauliString::from_index(n, static_cast<std::uint64_t>(k));
        prob.b[k] = p.expectation(rho);
        for (Eigen::Index s = 0; s < states; ++s) {
            const double v = snap(p.expectation(stab.states[static_cast<std::size_t>(s)]));
            prob.a(k, s) = v;
            prob.a(k, states + s) = -v;
        }
    }

    const auto res = lp::solve(prob, options);
    LpSolution sol;
    sol.status = res.status;
    sol.iterations = res.iterations;
    if (res.status == lp::Status::infeasible || res.status == lp::Status::unbounded) {
        throw std::logic_error("robustness_of_magic: stabilizer states span the operator space; LP status " +
                               std::string(lp::to_string(res.status)));
    }
    sol.coefficients.resize(static_cast<std::size_t>(states));
    for (Eigen::Index s = 0; s < states; ++s) {
        sol.coefficients[static_cast<std::size_t>(s)] = res.x[s] - res.x[states + s];
    }
    sol.objective = res.objective;

    const auto d = static_cast<Eigen::Index>(rho.dim());
    sol.witness = ComplexMatrix::Zero(d, d);
    if (res.status == lp::Status::optimal) {
        for (Eigen::Index k = 0; k < paulis; ++k) {
            if (res.y[k] != 0.0) sol.witness += res.y[k] * PauliString::from_index(n, static_cast<std::uint64_t>(k)).matrix();
        }
        sol.dual_value = res.y.dot(prob.b);
    }
    return sol;
}

double witness_bound(const ComplexMatrix& a, const DensityMatrix& rho, const StabilizerStateSet& stab) {
    if (a.rows() != static_cast<Eigen::Index>(rho.dim())) throw std::invalid_argument("witness_bound: dimension mismatch");
    double scale = 0.0;
    for (const auto& phi : stab.states) {
        const auto& v = phi.amplitudes();
        scale = std::max(scale, std::abs((v.adjoint() * a * v)(0, 0).real()));
    }
    if (scale == 0.0) throw std::invalid_argument("witness_bound: witness vanishes on every stabilizer state");
    const double value = (a.cwiseProduct(rho.matrix().transpose())).sum().real();
    return value / scale;
}

double decomposition_residual(const LpSolution& sol, const DensityMatrix& rho, const StabilizerStateSet& stab) {
    if (sol.coefficients.size() != stab.states.size()) throw std::invalid_argument("decomposition_residual: size mismatch");
    ComplexMatrix sum = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (std::size_t s = 0; s < stab.states.size(); ++s) {
        const double c = sol.coefficients[s];
        if (c == 0.0) continue;
        const auto& v = stab.states[s].amplitudes();
        sum += c * (v * v.adjoint());
    }
    return qcore::max_abs_diff(sum, rho.matrix());
}

double lr_lower_bound_from_purification(const PureState& psi, int m, const StabilizerStateSet& stab) {
    if (m < 0 || m >= psi.num_qubits()) throw std::invalid_argument("lr_lower_bound_from_purification: m out of range");
    return -std::log2(stabilizer_fidelity(psi, stab)) - 2.0 * m;
}

double relative_entropy_coherence(const DensityMatrix& rho) {
    const double c = qcore::von_neumann_entropy(qcore::dephase(rho)) - qcore::von_neumann_entropy(rho);
    return std::max(0.0, c);
}

HashingBound hashing_entanglement_bound(const DensityMatrix& rho, const qcore::Bipartition& cut) {
    if (cut.total() != rho.num_qubits()) throw std::invalid_argument("hashing_entanglement_bound: cut does not match the state");
    HashingBound h;
    h.raw = qcore::von_neumann_entropy(qcore::partial_trace(rho, cut.n_a)) - qcore::von_neumann_entropy(rho);
    h.certified = std::max(0.0, h.raw);
    return h;
}

}  // namespace prdm::monotones
