#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "prdm/qcore.hpp"

using namespace prdm::qcore;
using testing::random_mixed;
using testing::random_pure;

namespace {

// Plain-loop partial trace over the trailing qubits, written independently of
// the library routine.
ComplexMatrix naive_partial_trace(const ComplexMatrix& rho, int n, int keep) {
    const int drop = n - keep;
    const Eigen::Index da = Eigen::Index{1} << keep, db = Eigen::Index{1} << drop;
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            for (Eigen::Index k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
    return out;
}

DensityMatrix diag2(double a, double b) {
    const double p[2] = {a, b};
    return DensityMatrix::diagonal(1, p);
}

}  // namespace

TEST_CASE("tensor of maximally mixed and basis projectors") {
    CHECK(max_abs_diff(tensor(DensityMatrix::maximally_mixed(1), DensityMatrix::maximally_mixed(1)).matrix(),
                       DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    const auto t = tensor(DensityMatrix::basis_projector(1, 0), DensityMatrix::basis_projector(1, 1));
    CHECK(max_abs_diff(t.matrix(), DensityMatrix::basis_projector(2, 1).matrix()) == 0.0);
}

TEST_CASE("purity is multiplicative under tensor") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto a = random_mixed(1, 1, 2 * s), b = random_mixed(1, 1, 2 * s + 1);
        CHECK(purity(tensor(a, b)) == doctest::Approx(purity(a) * purity(b)).epsilon(1e-12));
    }
}

TEST_CASE("tensor beyond the qubit limit is rejected") {
    const int saved = max_total_qubits();
    set_max_total_qubits(3);
    CHECK_THROWS_AS(tensor(DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)), LimitExceeded);
    set_max_total_qubits(saved);
}

TEST_CASE("partial trace examples") {
    const auto bell = DensityMatrix::from_pure(testing::bell_pair());
    CHECK(max_abs_diff(partial_trace(bell, 1).matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    CHECK(max_abs_diff(partial_trace(DensityMatrix::basis_projector(2, 0), 1).matrix(),
                       DensityMatrix::basis_projector(1, 0).matrix()) == 0.0);
    CHECK_THROWS(partial_trace(bell, 0));
    CHECK_THROWS(partial_trace(bell, 3));
}

TEST_CASE("partial trace of a product returns the leading factor") {
    for (int na = 1; na <= 3; ++na) {
        for (int nb = 1; nb <= 2; ++nb) {
            const auto a = random_mixed(na, 1, static_cast<std::uint64_t>(10 * na + nb));
            const auto b = random_mixed(nb, 2, static_cast<std::uint64_t>(100 * na + nb));
            CHECK(max_abs_diff(partial_trace(tensor(a, b), na).matrix(), a.matrix()) < 1e-10);
        }
    }
}

TEST_CASE("partial trace agrees with a plain-loop oracle") {
    const auto rho = random_mixed(4, 2, 3);
    for (int keep = 1; keep <= 4; ++keep) {
        CHECK(max_abs_diff(partial_trace(rho, keep).matrix(), naive_partial_trace(rho.matrix(), 4, keep)) < 1e-12);
    }
    const auto psi = random_pure(5, 4);
    const auto proj = DensityMatrix::from_pure(psi);
    CHECK(max_abs_diff(partial_trace(psi, 3).matrix(), naive_partial_trace(proj.matrix(), 5, 3)) < 1e-12);
}

TEST_CASE("trace distance examples") {
    const auto zero = DensityMatrix::basis_projector(1, 0);
    const auto one = DensityMatrix::basis_projector(1, 1);
    const auto rho = random_mixed(2, 1, 8);
    CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
    CHECK(trace_distance(zero, DensityMatrix::maximally_mixed(1)) == doctest::Approx(0.5));
}

TEST_CASE("trace distance is a metric on random triples") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = random_mixed(2, 1, 3 * s), b = random_mixed(2, 1, 3 * s + 1), c = random_mixed(2, 2, 3 * s + 2);
        CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-8);
        CHECK(trace_distance(a, b) == doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("pure-state fidelity") {
    const auto psi = random_pure(3, 1);
    const auto proj = DensityMatrix::from_pure(psi);
    CHECK(fidelity(psi, proj) == doctest::Approx(1.0));
    CHECK(fidelity(DensityMatrix::basis_projector(1, 0), DensityMatrix::maximally_mixed(1)) == doctest::Approx(0.5));
    const double p = 0.3;
    const ComplexMatrix noisy = (1.0 - p) * proj.matrix() + (p / 8.0) * ComplexMatrix::Identity(8, 8);
    CHECK(fidelity(psi, DensityMatrix::from_matrix(3, noisy)) == doctest::Approx(1.0 - p + p / 8.0));
    CHECK_THROWS(fidelity(DensityMatrix::maximally_mixed(1), DensityMatrix::maximally_mixed(1)));
}

TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_entropy(DensityMatrix::from_pure(random_pure(3, 2))) == doctest::Approx(0.0).epsilon(1e-9));
    for (int n = 1; n <= 4; ++n) CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(n)) == doctest::Approx(n));
    const double expected = -0.75 * std::log2(0.75) - 0.25 * std::log2(0.25);
    CHECK(von_neumann_entropy(diag2(0.75, 0.25)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.8113).epsilon(1e-4));
}

TEST_CASE("entropy is additive under tensor") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto a = random_mixed(2, 1, s), b = random_mixed(1, 1, s + 50);
        CHECK(von_neumann_entropy(tensor(a, b)) ==
              doctest::Approx(von_neumann_entropy(a) + von_neumann_entropy(b)).epsilon(1e-8));
    }
}

TEST_CASE("purity values") {
    CHECK(purity(DensityMatrix::from_pure(random_pure(2, 0))) == doctest::Approx(1.0));
    CHECK(purity(DensityMatrix::maximally_mixed(3)) == doctest::Approx(0.125));
    CHECK(purity(diag2(0.75, 0.25)) == doctest::Approx(0.625));
    CHECK(is_pure(DensityMatrix::from_pure(random_pure(2, 1))));
    CHECK_FALSE(is_pure(diag2(0.75, 0.25)));
}

TEST_CASE("dephasing") {
    const auto d = diag2(0.3, 0.7);
    CHECK(max_abs_diff(dephase(d).matrix(), d.matrix()) == 0.0);
    ComplexVector plus(2);
    plus << 1.0, 1.0;
    const auto p = DensityMatrix::from_pure(PureState::normalized(1, plus));
    CHECK(max_abs_diff(dephase(p).matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);
    const auto rho = random_mixed(3, 2, 5);
    CHECK(max_abs_diff(dephase(dephase(rho)).matrix(), dephase(rho).matrix()) == 0.0);
    CHECK(max_abs_diff(partial_trace(dephase(rho), 2).matrix(), dephase(partial_trace(rho, 2)).matrix()) < 1e-14);
}

TEST_CASE("shannon entropy") {
    const double one[1] = {1.0};
    const double half[2] = {0.5, 0.5};
    CHECK(shannon_entropy(one) == 0.0);
    CHECK(shannon_entropy(half) == doctest::Approx(1.0));
    // Closed form: H = -(1-3p/4) log(1-3p/4) - 3 (p/4) log(p/4).
    auto h1 = [](double p) {
        const double a = 1.0 - 0.75 * p, b = 0.25 * p;
        return -a * std::log2(a) - 3.0 * b * std::log2(b);
    };
    const double p25[4] = {1.0 - 0.75 * 0.25, 0.0625, 0.0625, 0.0625};
    CHECK(shannon_entropy(p25) == doctest::Approx(h1(0.25)).epsilon(1e-12));
    CHECK(shannon_entropy(p25) == doctest::Approx(0.993393).epsilon(1e-6));
    const double bad[2] = {0.6, 0.6};
    CHECK_THROWS(shannon_entropy(bad));
    const double neg[2] = {1.2, -0.2};
    CHECK_THROWS(shannon_entropy(neg));
}

TEST_CASE("density matrix validation") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 0.5;
    m(1, 1) = 0.6;
    CHECK_THROWS(DensityMatrix::from_matrix(1, m));
    m(1, 1) = 0.5;
    m(0, 1) = 0.2;
    CHECK_THROWS(DensityMatrix::from_matrix(1, m));  // not Hermitian
    m(1, 0) = 0.2;
    CHECK_NOTHROW(DensityMatrix::from_matrix(1, m));
    m(0, 1) = m(1, 0) = 0.9;
    CHECK_THROWS(DensityMatrix::from_matrix(1, m));  // negative eigenvalue
}

TEST_CASE("bipartition validation") {
    CHECK_NOTHROW(Bipartition(1, 2));
    CHECK_THROWS(Bipartition(0, 2));
    CHECK_THROWS(Bipartition(2, 0));
}
