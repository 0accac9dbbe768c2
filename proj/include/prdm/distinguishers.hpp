// Distinguishing experiments: SWAP test and Helstrom probabilities, the
// purity attack against noisy pseudorandom states, single-copy (memoryless)
// learners and the EFI statistical gap.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "prdm/channels.hpp"
#include "prdm/qcore.hpp"
#include "prdm/rng.hpp"

namespace prdm::distinguishers {

/// Produces the state of trial `seed.stream_index`; must be deterministic in `seed`.
struct EnsembleSampler {
    std::string label;
    std::function<qcore::DensityMatrix(RngSeed seed)> generate;
};

/// A sampler that always returns `rho`.
EnsembleSampler constant_sampler(std::string label, qcore::DensityMatrix rho);
/// GHSE(n, m) samples.
EnsembleSampler ghse_sampler(int n, int m);
/// Keyed-hash PRDMs with a fresh random key of n+m bits per trial.
EnsembleSampler prdm_sampler(int n, int m);
/// `base` followed by `channel`.
EnsembleSampler noisy_sampler(EnsembleSampler base, channels::Channel channel);

struct DistinguishReport {
    std::size_t trials = 0;     // per hypothesis
    double rate_a = 0.0;        // acceptance (purity attack) or "guess a" rate under hypothesis a
    double rate_b = 0.0;        // the same under hypothesis b
    double advantage = 0.0;     // rate_a - rate_b, in [-1, 1]
    double success = 0.5;       // (1 + advantage) / 2
    double std_error = 0.0;     // of `advantage`
    double success_std_error = 0.0;
};

/// 1/2 (1 + tr(rho sigma))
double swap_test_prob(const qcore::DensityMatrix& rho, const qcore::DensityMatrix& sigma);
/// 1/2 (1 + TD(rho, sigma))
double helstrom_success(const qcore::DensityMatrix& rho, const qcore::DensityMatrix& sigma);

/// Each trial draws one state per hypothesis and simulates a single SWAP test
/// on two of its copies. The attack's advantage is |report.advantage|.
DistinguishReport purity_attack(const EnsembleSampler& clean, const EnsembleSampler& noisy, std::size_t trials,
                                std::uint64_t seed);

/// E[Pr_SWAP(clean)] - E[Pr_SWAP(noisy)] over `samples` draws, without the
/// Bernoulli measurement noise.
double expected_swap_gap(const EnsembleSampler& clean, const EnsembleSampler& noisy, std::size_t samples,
                         std::uint64_t seed);

// ------------------------------------------------------------ memoryless

/// Classical record of a single-copy experiment.
struct Transcript {
    std::vector<qcore::ComplexMatrix> bases;  // columns are the measurement vectors
    std::vector<std::size_t> basis_of_step;
    std::vector<std::size_t> outcomes;

    std::size_t steps() const { return outcomes.size(); }
    /// Pairs of steps measured in the same basis with the same outcome.
    double collisions() const;
};

/// Chooses one orthonormal basis per copy from the transcript so far and
/// condenses a finished transcript into a scalar statistic.
class MeasurementPolicy {
public:
    virtual ~MeasurementPolicy() = default;
    virtual std::string name() const = 0;
    /// Index into transcript.bases, or transcript.bases.size() after
    /// appending a new basis.
    virtual std::size_t choose_basis(Transcript& transcript, int num_qubits, Rng& rng) const = 0;
    virtual double statistic(const Transcript& transcript) const { return transcript.collisions(); }
};

std::unique_ptr<MeasurementPolicy> computational_policy();
std::unique_ptr<MeasurementPolicy> haar_basis_policy();
/// Re-measures the basis holding the most frequent outcome once some outcome
/// has repeated; before that it alternates between repeating the last basis
/// and opening a fresh Haar-random one.
std::unique_ptr<MeasurementPolicy> transcript_greedy_policy();
std::vector<std::string> policy_names();
/// Throws std::invalid_argument for unknown names.
std::unique_ptr<MeasurementPolicy> make_policy(const std::string& name);

Transcript run_memoryless(const qcore::DensityMatrix& rho, const MeasurementPolicy& policy, std::size_t copies,
                          Rng& rng);

struct MemorylessOptions {
    std::size_t copies = 8;
    std::size_t trials = 2000;
    std::size_t calibration_trials = 2000;
    std::uint64_t seed = 0;
};

/// The decision rule is a threshold on policy.statistic, fitted on
/// independent calibration trials and then evaluated on fresh ones. If no
/// threshold beats a constant guess on calibration data the guess is always
/// "a" and success is exactly 1/2.
DistinguishReport memoryless_sim(const EnsembleSampler& a, const EnsembleSampler& b, const MeasurementPolicy& policy,
                                 const MemorylessOptions& options);

/// Helstrom success between the exact t-copy average states; an upper bound
/// for every strategy, memoryless or not.
double memoryful_baseline(const qcore::DensityMatrix& moment_a, const qcore::DensityMatrix& moment_b);

// ------------------------------------------------------------------ EFI

struct EfiGap {
    double s0 = 0.0;                 // S(nu_0)
    double fannes_lower_bound = 0.0; // 1 - (S0 + 1) / n
    double exact_td = 0.0;           // TD(nu_0, I/2^n)
    bool vacuous() const { return fannes_lower_bound <= 0.0; }
};

EfiGap efi_gap(const qcore::DensityMatrix& nu0, int n);

inline constexpr int kMaxExhaustiveKeyBits = 12;

/// Average of make_prdm over all 2^kappa keys (keyed-hash PRF on n+m bits).
qcore::DensityMatrix prdm_key_average(int n, int m, int kappa);

struct NoiseBudget {
    double h = 0.0;       // entropy of the mixing probabilities
    double budget = 0.0;  // n(1 - c) - m - 2
    bool robust = false;  // h <= budget
};

NoiseBudget efi_noise_budget(int n, int m, double c, const channels::MixedUnitaryChannel& channel);
/// Same comparison with the channel entropy supplied directly, for sizes
/// where the channel cannot be built.
NoiseBudget efi_noise_budget_from_entropy(int n, int m, double c, double h);
/// Local depolarizing parameter at which n H1(p) equals the budget
/// (bisection; n H1 is increasing on [0, 1]). Returns 1 if the budget is
/// never reached and 0 if it is already negative.
double critical_local_depolarizing_p(int n, int m, double c);

}  // namespace prdm::distinguishers
