// Private-key quantum money built from binary-phase pseudorandom states:
// minting, noisy transport, threshold verification and counterfeiting
// attacks, including the embezzling attack on per-note serials.
//
// Note-key layout: note i of a banknote with serial s has the key q_i whose
// bytes are the little-endian concatenation of
//   keyed_digest(master_key, "note-key:" + hex(s) + ":" + decimal(i), j)
// for j = 0, 1, ..., truncated to note_key_bits.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prdm/channels.hpp"
#include "prdm/pseudostates.hpp"
#include "prdm/qcore.hpp"
#include "prdm/rng.hpp"

namespace prdm::qmoney {

enum class Scheme {
    single_serial,    // one serial per banknote
    per_note_serial,  // one serial per note; deliberately vulnerable to embezzling
};

enum class NoteFamily {
    binary_phase,        // |psi_q> for the derived key q
    computational_zero,  // |0...0> for every key; a clonable control
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
std::string to_string(NoteFamily f);
NoteFamily note_family_from_string(const std::string& s);

struct MoneyConfig {
    int n_note = 8;
    int L = 64;
    double eta = 0.05;
    double f_min = 0.75;
    pseudostates::Key master_key = pseudostates::Key::zero(128);
    pseudostates::PrfKind prf = pseudostates::PrfKind::keyed_hash;
    int serial_bits = 32;
    int note_key_bits = 128;
    NoteFamily family = NoteFamily::binary_phase;

    /// Throws std::invalid_argument unless F_min > 1/2, 0 < eta < 1 - F_min, L >= 1.
    void validate() const;
    /// ceil((F_min + eta) L), with a 1e-9 allowance for rounding in the product.
    int threshold() const;
    /// exp(-L eta^2 / (3 F_min))
    double chernoff_bound() const;
    pseudostates::PrfSpec note_prf() const;
};

using Serial = pseudostates::Key;

/// a I/d + sum_k w_k |phi_k><phi_k| + (optional dense part). Global
/// depolarizing keeps the compact form; other channels densify.
class NoteState {
public:
    static NoteState pure(qcore::PureState psi);
    static NoteState maximally_mixed(int n);
    static NoteState dense(const qcore::DensityMatrix& rho);

    int num_qubits() const { return n_; }
    /// <psi| note |psi>
    double fidelity(const qcore::PureState& psi) const;
    /// Computational-basis outcome distribution.
    std::vector<double> basis_probabilities() const;
    qcore::DensityMatrix to_density() const;
    NoteState transported(const channels::Channel& channel) const;

private:
    explicit NoteState(int n) : n_(n) {}

    int n_;
    double identity_weight_ = 0.0;
    std::vector<std::pair<double, qcore::PureState>> pure_parts_;
    qcore::ComplexMatrix dense_;  // empty when absent; carries its own weight
};

struct Banknote {
    Scheme scheme = Scheme::single_serial;
    Serial serial = Serial::zero(1);
    std::vector<Serial> note_serials;  // per_note_serial only, one per note
    std::vector<NoteState> notes;
};

pseudostates::Key note_key(const MoneyConfig& cfg, const Serial& serial, int index);
/// The state the bank expects at position `index` for `serial`.
qcore::PureState reference_state(const MoneyConfig& cfg, const Serial& serial, int index);

Banknote mint(const MoneyConfig& cfg, const Serial& serial);
/// Vulnerable variant: note i carries its own serial and q_i = f(serials[i], i).
Banknote mint_per_note_serial(const MoneyConfig& cfg, const std::vector<Serial>& serials);
Serial random_serial(const MoneyConfig& cfg, Rng& rng);

Banknote transport(const Banknote& note, const channels::Channel& channel);

/// Per-note acceptance probabilities |<psi_{q_i}| note_i |psi_{q_i}>|.
std::vector<double> note_fidelities(const MoneyConfig& cfg, const Banknote& banknote);

struct VerifyResult {
    int successes = 0;
    bool accepted = false;
};

/// Simulates each projection as a Bernoulli draw; accepts iff successes >= threshold.
VerifyResult verify(const MoneyConfig& cfg, const Banknote& banknote, RngSeed rng);
/// Exact acceptance probability (Poisson-binomial tail).
double acceptance_probability(const MoneyConfig& cfg, const Banknote& banknote);

/// P(sum of independent Bernoulli(p_i) >= k)
double poisson_binomial_upper_tail(const std::vector<double>& p, int k);
/// P(Binomial(n, p) >= k)
double binomial_upper_tail(int n, double p, int k);

struct CompletenessResult {
    std::size_t trials = 0;
    double empirical_error = 0.0;
    double std_error = 0.0;
    double exact_error = 0.0;   // from the per-note fidelities of the probe banknote
    double chernoff_bound = 0.0;
    double min_fidelity = 0.0;
    bool assumption_violated = false;  // min_fidelity < F_min + eta
};

CompletenessResult completeness_experiment(const MoneyConfig& cfg, const channels::Channel& channel,
                                           std::size_t trials, std::uint64_t seed);

struct EmbezzleResult {
    std::size_t trials = 0;
    double counterfeit_accept_rate = 0.0;
    double counterfeit_accept_exact = 0.0;
    double victims_still_valid_rate = 0.0;
    double victims_still_valid_exact = 0.0;  // minimum over victims
};

/// Steals note (v mod L) from each of the first L victims, replacing it with
/// I/2^n, and assembles the stolen notes into one counterfeit.
EmbezzleResult embezzle_attack(const MoneyConfig& cfg, Scheme scheme, int victims, std::size_t trials,
                               std::uint64_t seed);

struct CloneResult {
    std::size_t trials = 0;
    double acceptance_rate = 0.0;
    double exact_acceptance = 0.0;  // averaged over the measured outcomes of the probe banknote
    double mean_note_fidelity = 0.0;
};

/// Measures every note of a fresh banknote in the computational basis and
/// re-prepares the observed basis state.
CloneResult clone_attack(const MoneyConfig& cfg, std::size_t trials, std::uint64_t seed);

}  // namespace prdm::qmoney
