#include "prdm/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace prdm::ensembles {

using qcore::ComplexMatrix;
using qcore::ComplexVector;
using qcore::DensityMatrix;
using qcore::PureState;

GhseParams::GhseParams(int n_, int m_) : n(n_), m(m_) {
    if (n < 1) throw std::invalid_argument("GhseParams: n must be >= 1");
    if (m < 0) throw std::invalid_argument("GhseParams: m must be >= 0");
    qcore::require_qubits_within_limit(n + m, "GhseParams");
}

PureState sample_haar_state(int n, Rng& rng) {
    qcore::require_qubits_within_limit(n, "sample_haar_state");
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    ComplexVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.complex_normal();
    return PureState::normalized(n, std::move(v));
}

PureState sample_haar_state(int n, RngSeed seed) {
    Rng rng(seed);
    return sample_haar_state(n, rng);
}

DensityMatrix sample_ghse(const GhseParams& params, Rng& rng) {
    const auto da = static_cast<Eigen::Index>(qcore::dim_of(params.n));
    const auto db = static_cast<Eigen::Index>(qcore::dim_of(params.m));
    ComplexMatrix x(da, db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < db; ++j) x(i, j) = rng.complex_normal();
    }
    ComplexMatrix rho = x * x.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix::from_trusted(params.n, std::move(rho));
}

DensityMatrix sample_ghse(const GhseParams& params, RngSeed seed) {
    Rng rng(seed);
    return sample_ghse(params, rng);
}

ComplexMatrix sample_haar_unitary(int n, Rng& rng) {
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    ComplexMatrix z(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.complex_normal();
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto rjj = r(j, j);
        const double mag = std::abs(rjj);
        if (mag > 0.0) q.col(j) *= rjj / mag;
    }
    return q;
}

int cycle_count(const Permutation& perm) {
    std::vector<bool> seen(perm.size(), false);
    int cycles = 0;
    for (std::size_t start = 0; start < perm.size(); ++start) {
        if (seen[start]) continue;
        ++cycles;
        for (auto k = start; !seen[k]; k = static_cast<std::size_t>(perm[k])) seen[k] = true;
    }
    return cycles;
}

std::vector<Permutation> all_permutations(int t) {
    if (t < 1) throw std::invalid_argument("all_permutations: t must be >= 1");
    Permutation p(static_cast<std::size_t>(t));
    std::iota(p.begin(), p.end(), 0);
    std::vector<Permutation> out;
    do { out.push_back(p); } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::vector<std::size_t> permutation_index_map(const Permutation& perm, int n) {
    const int t = static_cast<int>(perm.size());
    qcore::require_qubits_within_limit(n * t, "permutation_index_map");
    const std::size_t block = qcore::dim_of(n);
    const std::size_t total = qcore::dim_of(n * t);
    std::vector<std::size_t> map(total);
    std::vector<std::size_t> digits(static_cast<std::size_t>(t));
    for (std::size_t j = 0; j < total; ++j) {
        // Factor k of the tensor product sits at block position k (leading first).
        std::size_t rest = j;
        for (int k = t - 1; k >= 0; --k) {
            digits[static_cast<std::size_t>(k)] = rest % block;
            rest /= block;
        }
        std::size_t i = 0;
        std::vector<std::size_t> moved(static_cast<std::size_t>(t));
        for (int k = 0; k < t; ++k) moved[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = digits[static_cast<std::size_t>(k)];
        for (int k = 0; k < t; ++k) i = i * block + moved[static_cast<std::size_t>(k)];
        map[j] = i;
    }
    return map;
}

ComplexMatrix permutation_operator(const Permutation& perm, int n) {
    const auto map = permutation_index_map(perm, n);
    const auto d = static_cast<Eigen::Index>(map.size());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < map.size(); ++j) {
        out(static_cast<Eigen::Index>(map[j]), static_cast<Eigen::Index>(j)) = 1.0;
    }
    return out;
}

DensityMatrix ghse_moment_exact(const GhseParams& params, int t) {
    if (t < 1) throw std::invalid_argument("ghse_moment_exact: t must be >= 1");
    if (t > kMaxMomentCopies) {
        throw std::invalid_argument("ghse_moment_exact: t exceeds the permutation-sum limit");
    }
    qcore::require_qubits_within_limit(params.n * t, "ghse_moment_exact");

    // log of 1 / prod_{k<t} (D + k), D = 2^{n+m}
    const double big_d = std::ldexp(1.0, params.n + params.m);
    double log_prefactor = 0.0;
    for (int k = 0; k < t; ++k) log_prefactor -= std::log(big_d + k);
    const double log_db = params.m * std::log(2.0);

    const auto d = static_cast<Eigen::Index>(qcore::dim_of(params.n * t));
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& perm : all_permutations(t)) {
        const double coeff = std::exp(log_prefactor + cycle_count(perm) * log_db);
        const auto map = permutation_index_map(perm, params.n);
        for (std::size_t j = 0; j < map.size(); ++j) {
            out(static_cast<Eigen::Index>(map[j]), static_cast<Eigen::Index>(j)) += coeff;
        }
    }
    return DensityMatrix::from_trusted(params.n * t, std::move(out));
}

DensityMatrix haar_moment_exact(int n, int t) {
    return ghse_moment_exact(GhseParams(n, 0), t);
}

double td_ghse_to_mixed(const GhseParams& params, int t) {
    const auto moment = ghse_moment_exact(params, t);
    return qcore::trace_distance(moment, DensityMatrix::maximally_mixed(params.n * t));
}

double td_envelope(const GhseParams& params, int t) {
    const double tt = t;
    return tt * (tt - 1.0) / (2.0 * std::ldexp(1.0, params.m)) * (1.0 + std::ldexp(1.0, -params.n - 1)) +
           2.0 * std::pow(tt, 4) / std::ldexp(1.0, 2 * params.m);
}

double expected_subsystem_purity(const GhseParams& params, int n_a) {
    if (n_a < 1 || n_a > params.n) {
        throw std::out_of_range("expected_subsystem_purity: n_A must lie in [1, n]");
    }
    const int total = params.total();
    return (std::ldexp(1.0, n_a) + std::ldexp(1.0, total - n_a)) / (std::ldexp(1.0, total) + 1.0);
}

double expected_diagonal_purity(const GhseParams& params) {
    return (std::ldexp(1.0, params.m) + 1.0) / (std::ldexp(1.0, params.total()) + 1.0);
}

}  // namespace prdm::ensembles
