#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "prdm/monotones.hpp"
#include "prdm/pseudostates.hpp"

using namespace prdm;
using namespace prdm::monotones;
using qcore::ComplexMatrix;
using qcore::DensityMatrix;
using qcore::PureState;

namespace {

// Kronecker products of hand-written single-qubit Paulis, indexed base 4.
ComplexMatrix pauli_by_code(int n, int code) {
    ComplexMatrix p[4];
    for (auto& m : p) m = ComplexMatrix::Zero(2, 2);
    p[0](0, 0) = p[0](1, 1) = 1.0;
    p[1](0, 1) = p[1](1, 0) = 1.0;
    p[2](0, 1) = qcore::Complex(0, -1);
    p[2](1, 0) = qcore::Complex(0, 1);
    p[3](0, 0) = 1.0;
    p[3](1, 1) = -1.0;
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = n - 1; q >= 0; --q) {
        const ComplexMatrix& f = p[(code >> (2 * q)) & 3];
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
        out = next;
    }
    return out;
}

std::vector<double> pauli_expectations(const PureState& psi) {
    const int n = psi.num_qubits();
    std::vector<double> e;
    for (int code = 0; code < (1 << (2 * n)); ++code) {
        e.push_back((psi.amplitudes().adjoint() * pauli_by_code(n, code) * psi.amplitudes())(0, 0).real());
    }
    return e;
}

double m2_oracle(const PureState& psi) {
    double s = 0.0;
    for (double x : pauli_expectations(psi)) s += std::pow(x, 4);
    return -std::log2(s / static_cast<double>(psi.dim()));
}

DensityMatrix t_density() { return DensityMatrix::from_pure(testing::t_state()); }

}  // namespace

TEST_CASE("stabilizer counts follow the product formula") {
    CHECK(stabilizer_count(1) == 6);
    CHECK(stabilizer_count(2) == 60);
    CHECK(stabilizer_count(3) == 1080);
    CHECK_THROWS(enumerate_stabilizer_states(4));
    CHECK_THROWS(enumerate_stabilizer_states(0));
}

TEST_CASE("enumerated states are distinct stabilizer states") {
    for (int n = 1; n <= 3; ++n) {
        const auto set = enumerate_stabilizer_states(n);
        REQUIRE(set.states.size() == stabilizer_count(n));
        const std::size_t check_limit = n == 3 ? 60 : set.states.size();
        for (std::size_t i = 0; i < check_limit; ++i) {
            int unit = 0;
            for (double e : pauli_expectations(set.states[i])) unit += std::abs(std::abs(e) - 1.0) < 1e-9 ? 1 : 0;
            CHECK(unit == (1 << n));
        }
        for (std::size_t i = 0; i < set.states.size(); ++i)
            for (std::size_t j = i + 1; j < set.states.size(); ++j)
                REQUIRE(std::norm(set.states[i].inner(set.states[j])) < 1.0 - 1e-9);
    }
}

TEST_CASE("single-qubit stabilizer states are the Pauli eigenstates") {
    const auto set = enumerate_stabilizer_states(1);
    int per_axis[4] = {0, 0, 0, 0};
    for (const auto& s : set.states) {
        const auto e = pauli_expectations(s);
        for (int k = 1; k < 4; ++k) per_axis[k] += std::abs(std::abs(e[static_cast<std::size_t>(k)]) - 1.0) < 1e-12 ? 1 : 0;
    }
    CHECK(per_axis[1] == 2);
    CHECK(per_axis[2] == 2);
    CHECK(per_axis[3] == 2);
}

TEST_CASE("stabilizer cache round trip") {
    const auto path = std::filesystem::temp_directory_path() / "prdm_stab_cache_test.txt";
    const auto set = enumerate_stabilizer_states(2);
    save_stabilizer_cache(set, path);
    const auto back = load_stabilizer_cache(path);
    REQUIRE(back.states.size() == set.states.size());
    for (std::size_t i = 0; i < set.states.size(); ++i) {
        CHECK((back.states[i].amplitudes() - set.states[i].amplitudes()).norm() < 1e-12);
    }
    CHECK(stabilizer_states_cached(2, path).states.size() == 60);
    std::filesystem::remove(path);
}

TEST_CASE("stabilizer fidelity") {
    const auto s1 = enumerate_stabilizer_states(1);
    const auto s2 = enumerate_stabilizer_states(2);
    for (const auto& s : s2.states) CHECK(stabilizer_fidelity(s, s2) == doctest::Approx(1.0));
    CHECK(stabilizer_fidelity(testing::t_state(), s1) == doctest::Approx(std::pow(std::cos(std::acos(-1.0) / 8), 2)));
    CHECK(stabilizer_fidelity(testing::t_state(), s1) == doctest::Approx(0.85355).epsilon(1e-5));
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto psi = testing::random_pure(2, i);
        double max_basis = 0.0;
        for (std::size_t x = 0; x < 4; ++x) max_basis = std::max(max_basis, std::norm(psi[x]));
        CHECK(max_basis >= 0.25);
        CHECK(stabilizer_fidelity(psi, s2) >= max_basis - 1e-12);
    }
}

TEST_CASE("stabilizer Renyi entropy") {
    for (const auto& s : enumerate_stabilizer_states(2).states) CHECK(std::abs(stabilizer_renyi_2(s)) < 1e-9);
    CHECK(stabilizer_renyi_2(testing::t_state()) == doctest::Approx(-std::log2(0.75)).epsilon(1e-12));
    CHECK(stabilizer_renyi_2(testing::t_state()) == doctest::Approx(0.41504).epsilon(1e-5));
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto psi = testing::random_pure(3, i);
        CHECK(stabilizer_renyi_2(psi) == doctest::Approx(m2_oracle(psi)).epsilon(1e-10));
        CHECK(stabilizer_renyi_2(psi) <= 3.0);
    }
}

TEST_CASE("M2 is additive") {
    for (std::uint64_t i = 0; i < 5; ++i) {
        const auto a = testing::random_pure(2, i), b = testing::random_pure(1, i + 100);
        CHECK(stabilizer_renyi_2(a.tensor(b)) == doctest::Approx(stabilizer_renyi_2(a) + stabilizer_renyi_2(b)).epsilon(1e-8));
    }
}

TEST_CASE("stabilizer fidelity is bounded by M2") {
    const auto s2 = enumerate_stabilizer_states(2);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto psi = testing::random_pure(2, i, 4242);
        CHECK(stabilizer_fidelity(psi, s2) <= std::pow(2.0, -stabilizer_renyi_2(psi) / 4.0) + 1e-12);
    }
}

TEST_CASE("robustness of free states is one") {
    const auto s1 = enumerate_stabilizer_states(1);
    const auto s2 = enumerate_stabilizer_states(2);
    for (const auto& s : s2.states) {
        const auto sol = robustness_of_magic(DensityMatrix::from_pure(s), s2);
        REQUIRE(sol.status == lp::Status::optimal);
        CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (int n = 1; n <= 2; ++n) {
        const auto sol = robustness_of_magic(DensityMatrix::maximally_mixed(n), n == 1 ? s1 : s2);
        CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(sol.log_robustness()) < 1e-9);
    }
}

TEST_CASE("three-qubit robustness") {
    const auto s3 = enumerate_stabilizer_states(3);
    for (std::size_t i = 0; i < s3.states.size(); i += 97) {
        const auto sol = robustness_of_magic(DensityMatrix::from_pure(s3.states[i]), s3);
        REQUIRE(sol.status == lp::Status::optimal);
        CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(robustness_of_magic(DensityMatrix::maximally_mixed(3), s3).objective == doctest::Approx(1.0).epsilon(1e-9));
    const auto rho = qcore::tensor(t_density(), DensityMatrix::basis_projector(2, 0));
    const auto sol = robustness_of_magic(rho, s3);
    CHECK(sol.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    CHECK(decomposition_residual(sol, rho, s3) < 1e-8);
    CHECK(sol.dual_value == doctest::Approx(sol.objective).epsilon(1e-8));
}

TEST_CASE("robustness of the T state") {
    const auto s1 = enumerate_stabilizer_states(1);
    const auto sol = robustness_of_magic(t_density(), s1);
    REQUIRE(sol.status == lp::Status::optimal);
    CHECK(std::abs(sol.objective - std::sqrt(2.0)) < 1e-5);
    CHECK(sol.log_robustness() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(decomposition_residual(sol, t_density(), s1) < 1e-7);
    // Hand-built dual certificate A = X + Y: |tr(A phi)| <= 1 on STAB and tr(A T) = sqrt 2.
    const ComplexMatrix a = pauli_by_code(1, 1) + pauli_by_code(1, 2);
    for (const auto& s : s1.states) {
        CHECK(std::abs((s.amplitudes().adjoint() * a * s.amplitudes())(0, 0).real()) <= 1.0 + 1e-12);
    }
    CHECK((a * t_density().matrix()).trace().real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(witness_bound(a, t_density(), s1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(witness_bound(sol.witness, t_density(), s1) == doctest::Approx(sol.objective).epsilon(1e-8));
}

TEST_CASE("robustness is stable under tensoring with a stabilizer state") {
    const auto s2 = enumerate_stabilizer_states(2);
    const auto zero = DensityMatrix::basis_projector(1, 0);
    const auto s1 = enumerate_stabilizer_states(1);
    for (std::uint64_t i = 0; i < 3; ++i) {
        const auto rho = testing::random_mixed(1, 1, i);
        const double r1 = robustness_of_magic(rho, s1).objective;
        CHECK(robustness_of_magic(qcore::tensor(rho, zero), s2).objective == doctest::Approx(r1).epsilon(1e-6));
    }
}

TEST_CASE("primal and dual sandwich on random states") {
    const auto s2 = enumerate_stabilizer_states(2);
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto rho = testing::random_mixed(2, 1, i, 31);
        const auto sol = robustness_of_magic(rho, s2);
        REQUIRE(sol.status == lp::Status::optimal);
        CHECK(decomposition_residual(sol, rho, s2) < 1e-7);
        double l1 = 0.0;
        for (double c : sol.coefficients) l1 += std::abs(c);
        CHECK(l1 == doctest::Approx(sol.objective).epsilon(1e-9));
        CHECK(witness_bound(sol.witness, rho, s2) <= sol.objective + 1e-6);
        CHECK(sol.dual_value == doctest::Approx(sol.objective).epsilon(1e-7));
    }
}

TEST_CASE("purification lower bound on log-robustness") {
    const auto s1 = enumerate_stabilizer_states(1);
    const auto s2 = enumerate_stabilizer_states(2);
    CHECK(lr_lower_bound_from_purification(s2.states[7], 0, s2) == doctest::Approx(0.0).epsilon(1e-12));
    const double tb = lr_lower_bound_from_purification(testing::t_state(), 0, s1);
    CHECK(tb == doctest::Approx(0.2284).epsilon(1e-3));
    CHECK(robustness_of_magic(t_density(), s1).log_robustness() >= tb);
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto psi = testing::random_pure(2, i, 555);
        const double lr = robustness_of_magic(DensityMatrix::from_pure(psi), s2).log_robustness();
        CHECK(lr_lower_bound_from_purification(psi, 0, s2) <= lr + 1e-6);
    }
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto psi = testing::random_pure(2, i, 556);
        const double lr = robustness_of_magic(qcore::partial_trace(psi, 1), s1).log_robustness();
        CHECK(lr_lower_bound_from_purification(psi, 1, s2) <= lr + 1e-6);
    }
}

TEST_CASE("relative entropy of coherence") {
    const double diag[4] = {0.1, 0.2, 0.3, 0.4};
    CHECK(relative_entropy_coherence(DensityMatrix::diagonal(2, diag)) == doctest::Approx(0.0).epsilon(1e-12));
    for (int n = 1; n <= 4; ++n) {
        const auto plus = qcore::PureState::normalized(n, qcore::ComplexVector::Ones(static_cast<Eigen::Index>(qcore::dim_of(n))));
        CHECK(relative_entropy_coherence(DensityMatrix::from_pure(plus)) == doctest::Approx(n).epsilon(1e-9));
    }
    Rng rng(RngSeed{8, 0});
    for (int i = 0; i < 20; ++i) {
        const int n = 4, m = 1 + i % 3;
        const auto rho = pseudostates::make_prdm(pseudostates::Key::random(n + m, rng), pseudostates::PrfSpec::keyed_hash(n + m), n, m);
        CHECK(relative_entropy_coherence(rho) >= n - m - 1e-8);
    }
}

TEST_CASE("hashing bound") {
    const auto bell = DensityMatrix::from_pure(testing::bell_pair());
    const auto b = hashing_entanglement_bound(bell, qcore::Bipartition(1, 1));
    CHECK(b.raw == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.certified == doctest::Approx(1.0).epsilon(1e-12));
    const auto mixed = hashing_entanglement_bound(DensityMatrix::maximally_mixed(3), qcore::Bipartition(1, 2));
    CHECK(mixed.raw == doctest::Approx(-2.0));
    CHECK(mixed.certified == 0.0);
    const auto psi = testing::random_pure(4, 3);
    const auto pure = hashing_entanglement_bound(DensityMatrix::from_pure(psi), qcore::Bipartition(2, 2));
    CHECK(pure.raw == doctest::Approx(qcore::von_neumann_entropy(qcore::partial_trace(psi, 2))).epsilon(1e-8));
    CHECK_THROWS(hashing_entanglement_bound(bell, qcore::Bipartition(1, 2)));
}
