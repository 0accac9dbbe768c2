#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "prdm/channels.hpp"
#include "prdm/qmoney.hpp"

using namespace prdm;
using namespace prdm::qmoney;
using qcore::DensityMatrix;

namespace {

MoneyConfig base_config() {
    MoneyConfig c;
    c.master_key = pseudostates::Key::from_hex("000102030405060708090a0b0c0d0e0f", 128);
    return c;
}

// Binomial upper tail by summing log-space terms, independent of the library DP.
double binomial_tail_oracle(int n, double p, int k) {
    double total = 0.0;
    for (int j = k; j <= n; ++j) {
        const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        total += std::exp(logc + j * std::log(p) + (n - j) * std::log1p(-p));
    }
    return total;
}

double poisson_binomial_brute(const std::vector<double>& p, int k) {
    const std::size_t n = p.size();
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double prob = 1.0;
        int ones = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool hit = (mask >> i) & 1u;
            prob *= hit ? p[i] : 1.0 - p[i];
            ones += hit ? 1 : 0;
        }
        if (ones >= k) total += prob;
    }
    return total;
}

}  // namespace

TEST_CASE("threshold arithmetic is an exact ceiling") {
    auto c = base_config();
    // F_min = 60/100 and eta = 5/100 give ceil(65 L / 100) in integers.
    c.f_min = 0.6;
    c.eta = 0.05;
    for (int L = 1; L <= 400; ++L) {
        c.L = L;
        CHECK(c.threshold() == (65 * L + 99) / 100);
    }
    c.f_min = 0.75;
    c.eta = 0.05;
    for (int L = 1; L <= 400; ++L) {
        c.L = L;
        CHECK(c.threshold() == (80 * L + 99) / 100);
    }
    c.L = 200;
    c.f_min = 0.6;
    CHECK(c.chernoff_bound() == doctest::Approx(std::exp(-200 * 0.0025 / 1.8)));
}

TEST_CASE("config validation") {
    auto c = base_config();
    CHECK_NOTHROW(c.validate());
    c.f_min = 0.5;
    CHECK_THROWS(c.validate());
    c.f_min = 0.9;
    c.eta = 0.1;
    CHECK_THROWS(c.validate());
    c = base_config();
    c.L = 0;
    CHECK_THROWS(c.validate());
    CHECK(scheme_from_string("per-note-serial") == Scheme::per_note_serial);
    CHECK(note_family_from_string(to_string(NoteFamily::computational_zero)) == NoteFamily::computational_zero);
    CHECK_THROWS(scheme_from_string("double"));
}

TEST_CASE("note keys follow the documented layout") {
    auto c = base_config();
    const auto serial = pseudostates::Key::from_hex("deadbeef", 32);
    const auto key = note_key(c, serial, 3);
    std::string expected;
    for (std::uint64_t j = 0; j < 2; ++j) {
        const auto word = pseudostates::keyed_digest(c.master_key, "note-key:deadbeef:3", j);
        for (int b = 0; b < 8; ++b) {
            char buf[3];
            std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>((word >> (8 * b)) & 0xffu));
            expected += buf;
        }
    }
    CHECK(key.to_hex() == expected);
}

TEST_CASE("minting") {
    auto c = base_config();
    c.L = 12;
    Rng rng(RngSeed{1, 0});
    const auto s = random_serial(c, rng);
    const auto a = mint(c, s), b = mint(c, s);
    REQUIRE(a.notes.size() == 12);
    for (int i = 0; i < c.L; ++i) {
        const auto ref = reference_state(c, s, i);
        CHECK(a.notes[static_cast<std::size_t>(i)].fidelity(ref) == doctest::Approx(1.0));
        CHECK(qcore::max_abs_diff(a.notes[static_cast<std::size_t>(i)].to_density().matrix(),
                                  b.notes[static_cast<std::size_t>(i)].to_density().matrix()) == 0.0);
    }
    double overlap = 0.0;
    for (int pair = 0; pair < 50; ++pair) {
        const auto s1 = random_serial(c, rng), s2 = random_serial(c, rng);
        overlap += std::norm(reference_state(c, s1, 0).inner(reference_state(c, s2, 0)));
    }
    CHECK(overlap / 50.0 <= 0.1);
}

TEST_CASE("transport") {
    auto c = base_config();
    c.L = 4;
    const auto s = pseudostates::Key::from_hex("01020304", 32);
    const auto note = mint(c, s);
    const auto same = transport(note, channels::identity_channel(8));
    CHECK(note_fidelities(c, same) == std::vector<double>(4, 1.0));
    const double p = 0.3;
    for (double f : note_fidelities(c, transport(note, channels::depolarizing_global(8, p)))) {
        CHECK(f == doctest::Approx(1.0 - p + p / 256.0).epsilon(1e-12));
    }
    const auto dead = transport(note, channels::depolarizing_global(8, 1.0));
    for (const auto& n : dead.notes) {
        CHECK(qcore::max_abs_diff(n.to_density().matrix(), DensityMatrix::maximally_mixed(8).matrix()) < 1e-15);
    }
    // Compact and dense representations agree with the amplitude-level fidelity.
    const auto local = transport(note, channels::depolarizing_local_factored(8, 0.1));
    for (int i = 0; i < c.L; ++i) {
        const auto ref = reference_state(c, s, i);
        const auto& n = local.notes[static_cast<std::size_t>(i)];
        CHECK(n.fidelity(ref) == doctest::Approx(qcore::fidelity(ref, n.to_density())).epsilon(1e-12));
    }
    CHECK_THROWS(transport(note, channels::depolarizing_global(7, 0.1)));
}

TEST_CASE("verification") {
    auto c = base_config();
    c.L = 64;
    const auto s = pseudostates::Key::from_hex("0a0b0c0d", 32);
    const auto note = mint(c, s);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto v = verify(c, note, RngSeed{4, t});
        CHECK(v.successes == c.L);
        CHECK(v.accepted);
    }
    const auto v1 = verify(c, note, RngSeed{5, 1});
    const auto v2 = verify(c, note, RngSeed{5, 1});
    CHECK(v1.successes == v2.successes);

    Banknote junk = note;
    for (auto& n : junk.notes) n = NoteState::maximally_mixed(8);
    const double exact = acceptance_probability(c, junk);
    CHECK(exact == doctest::Approx(binomial_tail_oracle(64, 1.0 / 256.0, c.threshold())).epsilon(1e-9));
    CHECK(exact <= 1e-6);
}

TEST_CASE("tail probabilities") {
    const std::vector<double> p{0.1, 0.5, 0.9, 0.3, 0.7, 0.2, 0.6, 0.45};
    for (int k = 0; k <= 9; ++k) CHECK(poisson_binomial_upper_tail(p, k) == doctest::Approx(poisson_binomial_brute(p, k)).epsilon(1e-12));
    for (int k : {0, 10, 40, 60}) {
        CHECK(binomial_upper_tail(64, 0.7, k) == doctest::Approx(binomial_tail_oracle(64, 0.7, k)).epsilon(1e-10));
    }
}

TEST_CASE("completeness") {
    auto c = base_config();
    c.f_min = 0.6;
    c.eta = 0.05;
    c.L = 50;
    const auto clean = completeness_experiment(c, channels::identity_channel(8), 200, 1);
    CHECK(clean.empirical_error == 0.0);
    CHECK_FALSE(clean.assumption_violated);

    const channels::Channel noise = channels::depolarizing_global(8, 0.3);
    double previous = 1.0;
    for (int L : {25, 50, 100, 200}) {
        c.L = L;
        const auto r = completeness_experiment(c, noise, 1000, 2);
        CHECK(r.empirical_error <= r.chernoff_bound + 3.0 * r.std_error);
        CHECK(r.empirical_error <= previous + 3.0 * r.std_error);
        CHECK(std::abs(r.empirical_error - r.exact_error) <= 4.0 * r.std_error + 1e-3);
        CHECK(r.min_fidelity == doctest::Approx(0.7 + 0.3 / 256.0));
        CHECK_FALSE(r.assumption_violated);
        previous = r.empirical_error;
    }
    c.L = 200;
    const auto strong = completeness_experiment(c, channels::depolarizing_global(8, 0.5), 100, 3);
    CHECK(strong.assumption_violated);
}

TEST_CASE("embezzling attack") {
    const auto c = base_config();
    const auto weak = embezzle_attack(c, Scheme::per_note_serial, 64, 1000, 5);
    const auto strong = embezzle_attack(c, Scheme::single_serial, 64, 1000, 5);
    CHECK(weak.counterfeit_accept_rate >= 0.99);
    CHECK(weak.victims_still_valid_rate >= 0.99);
    CHECK(strong.counterfeit_accept_rate <= 1e-3);
    CHECK(strong.counterfeit_accept_exact <= binomial_tail_oracle(64, 1.0 / 256.0, c.threshold()) * 1.01);
    CHECK(strong.victims_still_valid_rate >= 0.99);
    CHECK(strong.counterfeit_accept_rate <= weak.counterfeit_accept_rate);
    CHECK_THROWS(embezzle_attack(c, Scheme::single_serial, 10, 10, 5));
}

TEST_CASE("clone attack") {
    auto c = base_config();
    const auto r = clone_attack(c, 1000, 9);
    CHECK(r.mean_note_fidelity == doctest::Approx(1.0 / 256.0).epsilon(1e-9));
    CHECK(r.exact_acceptance <= 1e-6);
    CHECK(r.acceptance_rate == 0.0);
    c.family = NoteFamily::computational_zero;
    const auto z = clone_attack(c, 200, 9);
    CHECK(z.acceptance_rate == 1.0);
    CHECK(z.exact_acceptance == doctest::Approx(1.0));
}
