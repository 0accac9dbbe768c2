#include "prdm/distinguishers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "prdm/ensembles.hpp"
#include "prdm/parallel.hpp"
#include "prdm/pseudostates.hpp"

namespace prdm::distinguishers {

using qcore::ComplexMatrix;
using qcore::DensityMatrix;

namespace {

void require_same_dims(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
    if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

double rate_std_error(double p, std::size_t n) {
    return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

DistinguishReport make_report(std::size_t trials, std::size_t hits_a, std::size_t hits_b) {
    DistinguishReport r;
    r.trials = trials;
    if (trials == 0) return r;
    const double n = static_cast<double>(trials);
    r.rate_a = static_cast<double>(hits_a) / n;
    r.rate_b = static_cast<double>(hits_b) / n;
    r.advantage = r.rate_a - r.rate_b;
    r.success = 0.5 * (1.0 + r.advantage);
    r.std_error = std::hypot(rate_std_error(r.rate_a, trials), rate_std_error(r.rate_b, trials));
    r.success_std_error = 0.5 * r.std_error;
    return r;
}

double trace_product(const DensityMatrix& a, const DensityMatrix& b) {
    return (a.matrix().cwiseProduct(b.matrix().transpose())).sum().real();
}

class ComputationalPolicy final : public MeasurementPolicy {
public:
    std::string name() const override { return "computational"; }
    std::size_t choose_basis(Transcript& t, int num_qubits, Rng&) const override {
        if (t.bases.empty()) {
            const auto d = static_cast<Eigen::Index>(qcore::dim_of(num_qubits));
            t.bases.push_back(ComplexMatrix::Identity(d, d));
        }
        return 0;
    }
};

class HaarBasisPolicy final : public MeasurementPolicy {
public:
    std::string name() const override { return "haar-basis"; }
    std::size_t choose_basis(Transcript& t, int num_qubits, Rng& rng) const override {
        t.bases.push_back(ensembles::sample_haar_unitary(num_qubits, rng));
        return t.bases.size() - 1;
    }
};

class TranscriptGreedyPolicy final : public MeasurementPolicy {
public:
    std::string name() const override { return "transcript-greedy"; }
    std::size_t choose_basis(Transcript& t, int num_qubits, Rng& rng) const override {
        std::map<std::pair<std::size_t, std::size_t>, int> counts;
        std::size_t best_basis = 0;
        int best = 0;
        for (std::size_t s = 0; s < t.steps(); ++s) {
            const int c = ++counts[{t.basis_of_step[s], t.outcomes[s]}];
            if (c > best) {
                best = c;
                best_basis = t.basis_of_step[s];
            }
        }
        if (best >= 2) return best_basis;
        if (t.steps() > 0) {
            const std::size_t last = t.basis_of_step.back();
            const auto uses = std::count(t.basis_of_step.begin(), t.basis_of_step.end(), last);
            if (uses == 1) return last;
        }
        t.bases.push_back(ensembles::sample_haar_unitary(num_qubits, rng));
        return t.bases.size() - 1;
    }
};

struct Calibration {
    int direction = 0;  // 0: constant guess "a"; +1: a iff s > tau; -1: a iff s < tau
    double tau = 0.0;

    bool guess_a(double s) const {
        if (direction > 0) return s > tau;
        if (direction < 0) return s < tau;
        return true;
    }
};

Calibration calibrate(const std::vector<double>& sa, const std::vector<double>& sb) {
    Calibration best;
    if (sa.empty() || sb.empty()) return best;
    std::vector<double> values(sa);
    values.insert(values.end(), sb.begin(), sb.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<double> a_sorted(sa), b_sorted(sb);
    std::sort(a_sorted.begin(), a_sorted.end());
    std::sort(b_sorted.begin(), b_sorted.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    double best_success = 0.5;
    for (double tau : values) {
        // Fractions strictly above and strictly below tau.
        const double a_above = static_cast<double>(a_sorted.end() - std::upper_bound(a_sorted.begin(), a_sorted.end(), tau)) / na;
        const double b_above = static_cast<double>(b_sorted.end() - std::upper_bound(b_sorted.begin(), b_sorted.end(), tau)) / nb;
        const double a_below = static_cast<double>(std::lower_bound(a_sorted.begin(), a_sorted.end(), tau) - a_sorted.begin()) / na;
        const double b_below = static_cast<double>(std::lower_bound(b_sorted.begin(), b_sorted.end(), tau) - b_sorted.begin()) / nb;
        const double up = 0.5 * (1.0 + a_above - b_above);
        const double down = 0.5 * (1.0 + a_below - b_below);
        if (up > best_success + 1e-12) {
            best_success = up;
            best = {+1, tau};
        }
        if (down > best_success + 1e-12) {
            best_success = down;
            best = {-1, tau};
        }
    }
    return best;
}

std::vector<double> statistics(const EnsembleSampler& sampler, const MeasurementPolicy& policy, std::size_t copies,
                               std::size_t trials, std::uint64_t state_seed, std::uint64_t meas_seed) {
    std::vector<double> out(trials, 0.0);
    parallel_for(trials, [&](std::size_t i) {
        const auto rho = sampler.generate({state_seed, i});
        Rng rng({meas_seed, i});
        out[i] = policy.statistic(run_memoryless(rho, policy, copies, rng));
    });
    return out;
}

}  // namespace

EnsembleSampler constant_sampler(std::string label, DensityMatrix rho) {
    return {std::move(label), [rho = std::move(rho)](RngSeed) { return rho; }};
}

EnsembleSampler ghse_sampler(int n, int m) {
    const ensembles::GhseParams params(n, m);
    return {"ghse(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")",
            [params](RngSeed seed) { return ensembles::sample_ghse(params, seed); }};
}

EnsembleSampler prdm_sampler(int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("prdm_sampler: need n >= 1 and m >= 0");
    qcore::require_qubits_within_limit(n + m, "prdm_sampler");
    return {"prdm(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")", [n, m](RngSeed seed) {
                Rng rng(seed);
                const auto key = pseudostates::Key::random(n + m, rng);
                return pseudostates::make_prdm(key, pseudostates::PrfSpec::keyed_hash(n + m), n, m);
            }};
}

EnsembleSampler noisy_sampler(EnsembleSampler base, channels::Channel channel) {
    std::string label = base.label + "+noise";
    return {std::move(label), [base = std::move(base), channel = std::move(channel)](RngSeed seed) {
                return channels::apply(channel, base.generate(seed));
            }};
}

double swap_test_prob(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dims(rho, sigma, "swap_test_prob");
    return std::clamp(0.5 * (1.0 + trace_product(rho, sigma)), 0.0, 1.0);
}

double helstrom_success(const DensityMatrix& rho, const DensityMatrix& sigma) {
    require_same_dims(rho, sigma, "helstrom_success");
    return 0.5 * (1.0 + qcore::trace_distance(rho, sigma));
}

DistinguishReport purity_attack(const EnsembleSampler& clean, const EnsembleSampler& noisy, std::size_t trials,
                                std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("purity_attack: need at least one trial");
    const std::uint64_t state_seed = derive_seed(seed, "purity/states");
    const std::uint64_t seed_a = derive_seed(seed, "purity/swap-a");
    const std::uint64_t seed_b = derive_seed(seed, "purity/swap-b");
    std::vector<std::uint8_t> hit_a(trials, 0), hit_b(trials, 0);
    parallel_for(trials, [&](std::size_t i) {
        const auto ra = clean.generate({state_seed, i});
        const auto rb = noisy.generate({state_seed, i});
        Rng ga({seed_a, i});
        Rng gb({seed_b, i});
        hit_a[i] = ga.bernoulli(swap_test_prob(ra, ra)) ? 1 : 0;
        hit_b[i] = gb.bernoulli(swap_test_prob(rb, rb)) ? 1 : 0;
    });
    std::size_t sa = 0, sb = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        sa += hit_a[i];
        sb += hit_b[i];
    }
    return make_report(trials, sa, sb);
}

double expected_swap_gap(const EnsembleSampler& clean, const EnsembleSampler& noisy, std::size_t samples,
                         std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("expected_swap_gap: need at least one sample");
    const std::uint64_t state_seed = derive_seed(seed, "purity/states");
    std::vector<double> gap(samples, 0.0);
    parallel_for(samples, [&](std::size_t i) {
        const auto ra = clean.generate({state_seed, i});
        const auto rb = noisy.generate({state_seed, i});
        gap[i] = swap_test_prob(ra, ra) - swap_test_prob(rb, rb);
    });
    double total = 0.0;
    for (double g : gap) total += g;
    return total / static_cast<double>(samples);
}

double Transcript::collisions() const {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
    for (std::size_t s = 0; s < steps(); ++s) ++counts[{basis_of_step[s], outcomes[s]}];
    double pairs = 0.0;
    for (const auto& [key, c] : counts) pairs += 0.5 * static_cast<double>(c) * static_cast<double>(c - 1);
    return pairs;
}

std::unique_ptr<MeasurementPolicy> computational_policy() { return std::make_unique<ComputationalPolicy>(); }
std::unique_ptr<MeasurementPolicy> haar_basis_policy() { return std::make_unique<HaarBasisPolicy>(); }
std::unique_ptr<MeasurementPolicy> transcript_greedy_policy() { return std::make_unique<TranscriptGreedyPolicy>(); }

std::vector<std::string> policy_names() { return {"computational", "haar-basis", "transcript-greedy"}; }

std::unique_ptr<MeasurementPolicy> make_policy(const std::string& name) {
    if (name == "computational") return computational_policy();
    if (name == "haar-basis") return haar_basis_policy();
    if (name == "transcript-greedy") return transcript_greedy_policy();
    throw std::invalid_argument("unknown measurement policy '" + name + "'");
}

Transcript run_memoryless(const DensityMatrix& rho, const MeasurementPolicy& policy, std::size_t copies, Rng& rng) {
    const int n = rho.num_qubits();
    const auto d = static_cast<Eigen::Index>(rho.dim());
    Transcript t;
    std::size_t validated = 0;
    for (std::size_t step = 0; step < copies; ++step) {
        const std::size_t k = policy.choose_basis(t, n, rng);
        for (; validated < t.bases.size(); ++validated) {
            const auto& u = t.bases[validated];
            if (u.rows() != d || u.cols() != d || !qcore::is_unitary(u, 1e-9)) {
                throw std::invalid_argument("memoryless: policy '" + policy.name() + "' produced an invalid basis");
            }
        }
        if (k >= t.bases.size()) throw std::invalid_argument("memoryless: policy '" + policy.name() + "' chose a missing basis");
        const auto& u = t.bases[k];
        const double r = rng.uniform();
        double acc = 0.0;
        std::size_t outcome = static_cast<std::size_t>(d - 1);
        for (Eigen::Index x = 0; x < d; ++x) {
            acc += (u.col(x).adjoint() * rho.matrix() * u.col(x))(0, 0).real();
            if (r < acc) {
                outcome = static_cast<std::size_t>(x);
                break;
            }
        }
        t.basis_of_step.push_back(k);
        t.outcomes.push_back(outcome);
    }
    return t;
}

DistinguishReport memoryless_sim(const EnsembleSampler& a, const EnsembleSampler& b, const MeasurementPolicy& policy,
                                 const MemorylessOptions& opt) {
    if (opt.trials == 0) throw std::invalid_argument("memoryless_sim: need at least one trial");
    const std::uint64_t s = opt.seed;
    const auto cal_a = statistics(a, policy, opt.copies, opt.calibration_trials, derive_seed(s, "ml/cal-state-a"),
                                  derive_seed(s, "ml/cal-meas-a"));
    const auto cal_b = statistics(b, policy, opt.copies, opt.calibration_trials, derive_seed(s, "ml/cal-state-b"),
                                  derive_seed(s, "ml/cal-meas-b"));
    const Calibration rule = calibrate(cal_a, cal_b);

    const auto ev_a = statistics(a, policy, opt.copies, opt.trials, derive_seed(s, "ml/state-a"), derive_seed(s, "ml/meas-a"));
    const auto ev_b = statistics(b, policy, opt.copies, opt.trials, derive_seed(s, "ml/state-b"), derive_seed(s, "ml/meas-b"));
    std::size_t guess_a_under_a = 0, guess_a_under_b = 0;
    for (double v : ev_a) guess_a_under_a += rule.guess_a(v) ? 1 : 0;
    for (double v : ev_b) guess_a_under_b += rule.guess_a(v) ? 1 : 0;
    return make_report(opt.trials, guess_a_under_a, guess_a_under_b);
}

double memoryful_baseline(const DensityMatrix& moment_a, const DensityMatrix& moment_b) {
    return helstrom_success(moment_a, moment_b);
}

EfiGap efi_gap(const DensityMatrix& nu0, int n) {
    if (n != nu0.num_qubits()) throw std::invalid_argument("efi_gap: n does not match the state");
    EfiGap g;
    g.s0 = qcore::von_neumann_entropy(nu0);
    g.fannes_lower_bound = 1.0 - (g.s0 + 1.0) / static_cast<double>(n);
    g.exact_td = qcore::trace_distance(nu0, DensityMatrix::maximally_mixed(n));
    return g;
}

DensityMatrix prdm_key_average(int n, int m, int kappa) {
    if (kappa < 1 || kappa > kMaxExhaustiveKeyBits) throw std::invalid_argument("prdm_key_average: kappa must lie in [1, 12]");
    const auto spec = pseudostates::PrfSpec::keyed_hash(n + m);
    const std::size_t keys = std::size_t{1} << kappa;
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    std::vector<ComplexMatrix> parts(keys);
    parallel_for(keys, [&](std::size_t v) {
        parts[v] = pseudostates::make_prdm(pseudostates::Key::from_index(v, kappa), spec, n, m).matrix();
    });
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& p : parts) sum += p;
    sum /= static_cast<double>(keys);
    return DensityMatrix::from_trusted(n, std::move(sum));
}

NoiseBudget efi_noise_budget_from_entropy(int n, int m, double c, double h) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("efi_noise_budget: c must lie in (0, 1)");
    NoiseBudget nb;
    nb.h = h;
    nb.budget = n * (1.0 - c) - m - 2.0;
    nb.robust = h <= nb.budget;
    return nb;
}

NoiseBudget efi_noise_budget(int n, int m, double c, const channels::MixedUnitaryChannel& channel) {
    return efi_noise_budget_from_entropy(n, m, c, channels::channel_entropy(channel));
}

double critical_local_depolarizing_p(int n, int m, double c) {
    const double budget = efi_noise_budget_from_entropy(n, m, c, 0.0).budget;
    if (budget < 0.0) return 0.0;
    if (channels::local_depolarizing_entropy(n, 1.0) <= budget) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (channels::local_depolarizing_entropy(n, mid) <= budget) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace prdm::distinguishers
