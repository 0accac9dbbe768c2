#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "prdm/distinguishers.hpp"
#include "prdm/pauli.hpp"
#include "prdm/pseudostates.hpp"

using namespace prdm;
using namespace prdm::distinguishers;
using qcore::ComplexMatrix;
using qcore::DensityMatrix;

namespace {

// tr[(rho (x) sigma) Pi_sym] with the SWAP built from basis indices.
double symmetric_projector_oracle(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix swap = ComplexMatrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) swap(j * d + i, i * d + j) = 1.0;
    const ComplexMatrix proj = 0.5 * (ComplexMatrix::Identity(d * d, d * d) + swap);
    return (qcore::tensor(rho, sigma).matrix() * proj).trace().real();
}

// Purity of the locally depolarized pure state via its Pauli spectrum:
// tr(L(psi)^2) = d^{-1} sum_P <P>^2 (1-p)^{2|P|}.
double local_depolarized_purity(const qcore::PureState& psi, double p) {
    const int n = psi.num_qubits();
    double total = 0.0;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << (2 * n)); ++k) {
        const auto ps = PauliString::from_index(n, k);
        const double e = ps.expectation(psi);
        total += e * e * std::pow(1.0 - p, 2 * ps.weight());
    }
    return total / static_cast<double>(psi.dim());
}

class BrokenPolicy : public MeasurementPolicy {
public:
    std::string name() const override { return "broken"; }
    std::size_t choose_basis(Transcript& t, int num_qubits, Rng&) const override {
        const auto d = static_cast<Eigen::Index>(qcore::dim_of(num_qubits));
        t.bases.push_back(2.0 * ComplexMatrix::Identity(d, d));
        return t.bases.size() - 1;
    }
};

}  // namespace

TEST_CASE("SWAP test probability") {
    const auto psi = DensityMatrix::from_pure(testing::random_pure(2, 1));
    CHECK(swap_test_prob(psi, psi) == doctest::Approx(1.0));
    for (int n = 1; n <= 3; ++n) {
        CHECK(swap_test_prob(DensityMatrix::maximally_mixed(n), DensityMatrix::maximally_mixed(n)) ==
              doctest::Approx(0.5 + std::ldexp(1.0, -n - 1)));
        for (std::uint64_t s = 0; s < 4; ++s) {
            const auto a = testing::random_mixed(n, 1, 2 * s), b = testing::random_mixed(n, 2, 2 * s + 1);
            CHECK(std::abs(swap_test_prob(a, b) - symmetric_projector_oracle(a, b)) < 1e-10);
        }
    }
    CHECK_THROWS(swap_test_prob(DensityMatrix::maximally_mixed(1), DensityMatrix::maximally_mixed(2)));
}

TEST_CASE("Helstrom success") {
    const auto rho = testing::random_mixed(2, 1, 4);
    CHECK(helstrom_success(rho, rho) == doctest::Approx(0.5));
    CHECK(helstrom_success(DensityMatrix::basis_projector(1, 0), DensityMatrix::basis_projector(1, 1)) == doctest::Approx(1.0));
    CHECK(helstrom_success(DensityMatrix::basis_projector(1, 0), DensityMatrix::maximally_mixed(1)) == doctest::Approx(0.75));
}

TEST_CASE("purity attack on identical samplers shows no signal") {
    const auto s = ghse_sampler(2, 1);
    int within = 0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto r = purity_attack(s, s, 2000, 1000 + rep);
        within += std::abs(r.advantage) <= 3.0 * r.std_error ? 1 : 0;
        CHECK(std::abs(r.advantage) <= 1.0);
    }
    CHECK(within >= 19);
}

TEST_CASE("purity attack against local depolarizing") {
    const double p = 0.2;
    const auto clean0 = prdm_sampler(4, 0);
    const auto noisy0 = noisy_sampler(clean0, channels::depolarizing_local_factored(4, p));
    const auto r0 = purity_attack(clean0, noisy0, 10000, 7);
    CHECK(std::abs(r0.advantage) >= 0.05);

    // Exact expectation from the Pauli spectrum of the sampled states.
    double oracle = 0.0;
    const std::size_t samples = 200;
    const std::uint64_t state_seed = derive_seed(7, "purity/states");
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng({state_seed, i});
        const auto key = pseudostates::Key::random(4, rng);
        const auto psi = pseudostates::binary_phase_state(key, pseudostates::PrfSpec::keyed_hash(4), 4);
        oracle += 0.5 * (1.0 - local_depolarized_purity(psi, p));
    }
    oracle /= static_cast<double>(samples);
    CHECK(expected_swap_gap(clean0, noisy0, samples, 7) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(std::abs(r0.advantage - oracle) <= 4.0 * r0.std_error + 0.01);

    const auto clean6 = prdm_sampler(4, 6);
    const auto noisy6 = noisy_sampler(clean6, channels::depolarizing_local_factored(4, p));
    const auto r6 = purity_attack(clean6, noisy6, 10000, 8);
    CHECK(std::abs(r6.advantage) <= 3.0 * r6.std_error);
    CHECK(r6.std_error >= 0.0);
}

TEST_CASE("memoryless simulation") {
    MemorylessOptions opt;
    opt.copies = 8;
    opt.trials = 2000;
    opt.calibration_trials = 2000;
    opt.seed = 3;
    const auto mixed = constant_sampler("mixed", DensityMatrix::maximally_mixed(1));
    const auto zero = constant_sampler("zero", DensityMatrix::basis_projector(1, 0));

    SUBCASE("identical hypotheses") {
        for (const auto& name : policy_names()) {
            const auto r = memoryless_sim(mixed, mixed, *make_policy(name), opt);
            CHECK(std::abs(r.success - 0.5) <= 3.0 * r.success_std_error + 1e-12);
        }
    }
    SUBCASE("pure singleton control") {
        const auto r = memoryless_sim(zero, mixed, *computational_policy(), opt);
        // The likelihood-ratio test guesses "zero" iff every outcome is 0.
        const double analytic = 0.5 * (1.0 + (1.0 - std::ldexp(1.0, -8)));
        CHECK(r.success >= 0.95);
        CHECK(std::abs(r.success - analytic) <= 3.0 * r.success_std_error + 1e-3);
        const double baseline = memoryful_baseline(qcore::tensor_power(DensityMatrix::basis_projector(1, 0), 8),
                                                   DensityMatrix::maximally_mixed(8));
        CHECK(baseline == doctest::Approx(analytic).epsilon(1e-12));
        CHECK(r.success <= baseline + 3.0 * r.success_std_error);
    }
    SUBCASE("zero copies forces a coin flip") {
        opt.copies = 0;
        CHECK(memoryless_sim(zero, mixed, *computational_policy(), opt).success == 0.5);
    }
    SUBCASE("memoryful baseline bounds every policy") {
        const distinguishers::EnsembleSampler haar{
            "haar", [](RngSeed s) { return DensityMatrix::from_pure(ensembles::sample_haar_state(2, s)); }};
        const auto mixed2 = constant_sampler("mixed", DensityMatrix::maximally_mixed(2));
        opt.copies = 3;
        opt.trials = 1000;
        opt.calibration_trials = 1000;
        const double baseline = memoryful_baseline(ensembles::haar_moment_exact(2, 3), DensityMatrix::maximally_mixed(6));
        for (const auto& name : policy_names()) {
            const auto r = memoryless_sim(haar, mixed2, *make_policy(name), opt);
            CHECK(r.success <= baseline + 3.0 * r.success_std_error);
        }
    }
    SUBCASE("policies") {
        CHECK(policy_names().size() == 3);
        CHECK_THROWS(make_policy("oracle"));
        Rng rng(RngSeed{1, 0});
        CHECK_THROWS(run_memoryless(DensityMatrix::maximally_mixed(1), BrokenPolicy{}, 2, rng));
        const auto t = run_memoryless(DensityMatrix::basis_projector(2, 3), *computational_policy(), 5, rng);
        CHECK(t.steps() == 5);
        for (auto o : t.outcomes) CHECK(o == 3);
        CHECK(t.collisions() == 10.0);
    }
}

TEST_CASE("EFI gap") {
    const auto pure = efi_gap(DensityMatrix::basis_projector(4, 5), 4);
    CHECK(pure.s0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pure.fannes_lower_bound == doctest::Approx(0.75));
    CHECK(pure.exact_td == doctest::Approx(1.0 - 1.0 / 16.0));
    const auto mixed = efi_gap(DensityMatrix::maximally_mixed(4), 4);
    CHECK(mixed.fannes_lower_bound == doctest::Approx(-0.25));
    CHECK(mixed.exact_td == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mixed.vacuous());

    const auto nu0 = prdm_key_average(5, 1, 6);
    ComplexMatrix oracle = ComplexMatrix::Zero(32, 32);
    for (std::uint64_t k = 0; k < 64; ++k) {
        const auto psi = pseudostates::binary_phase_state(pseudostates::Key::from_index(k, 6), pseudostates::PrfSpec::keyed_hash(6), 6);
        oracle += qcore::partial_trace(DensityMatrix::from_pure(psi), 5).matrix();
    }
    oracle /= 64.0;
    CHECK(qcore::max_abs_diff(nu0.matrix(), oracle) < 1e-14);
    const auto g = efi_gap(nu0, 5);
    CHECK(g.s0 <= 7.0);
    CHECK(g.exact_td >= g.fannes_lower_bound - 1e-8);
    CHECK_THROWS(prdm_key_average(3, 1, 13));

    for (int kappa = 1; kappa <= 8; ++kappa) {
        for (int n = 2; n <= 5; ++n) {
            const auto gg = efi_gap(prdm_key_average(n, 1, kappa), n);
            CHECK(gg.exact_td >= gg.fannes_lower_bound - 1e-8);
            CHECK(gg.s0 <= kappa + 1 + 1e-9);
        }
    }
}

TEST_CASE("EFI noise budget") {
    const auto id = efi_noise_budget(6, 1, 0.1, channels::identity_channel(2));
    CHECK(id.h == 0.0);
    CHECK(id.robust);
    const double h25 = channels::local_depolarizing_entropy(100, 0.25);
    const double h20 = channels::local_depolarizing_entropy(100, 0.20);
    CHECK(h25 == doctest::Approx(99.3393).epsilon(1e-5));
    CHECK(h20 == doctest::Approx(84.7585).epsilon(1e-5));
    const auto b25 = efi_noise_budget_from_entropy(100, 10, 1e-4, h25);
    const auto b20 = efi_noise_budget_from_entropy(100, 10, 1e-4, h20);
    CHECK(b25.budget == doctest::Approx(87.99));
    CHECK_FALSE(b25.robust);
    CHECK(b20.robust);
    const double pc = critical_local_depolarizing_p(100, 10, 1e-4);
    CHECK(pc >= 0.20);
    CHECK(pc <= 0.25);
    CHECK(channels::local_depolarizing_entropy(100, pc) == doctest::Approx(87.99).epsilon(1e-8));
    CHECK(efi_noise_budget(3, 0, 0.5, channels::depolarizing_local(3, 0.25)).h == doctest::Approx(2.98018).epsilon(1e-5));
    CHECK_THROWS(efi_noise_budget_from_entropy(10, 1, 0.0, 1.0));
}
