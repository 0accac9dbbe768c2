#include "prdm/qmoney.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prdm/parallel.hpp"

namespace prdm::qmoney {

using pseudostates::Key;
using qcore::ComplexMatrix;
using qcore::DensityMatrix;
using qcore::PureState;

std::string to_string(Scheme s) { return s == Scheme::single_serial ? "single-serial" : "per-note-serial"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "single-serial") return Scheme::single_serial;
    if (s == "per-note-serial") return Scheme::per_note_serial;
    throw std::invalid_argument("unknown money scheme '" + s + "'");
}

std::string to_string(NoteFamily f) { return f == NoteFamily::binary_phase ? "binary-phase" : "computational-zero"; }

NoteFamily note_family_from_string(const std::string& s) {
    if (s == "binary-phase") return NoteFamily::binary_phase;
    if (s == "computational-zero") return NoteFamily::computational_zero;
    throw std::invalid_argument("unknown note family '" + s + "'");
}

// ------------------------------------------------------------- MoneyConfig

void MoneyConfig::validate() const {
    if (n_note < 1 || n_note > pseudostates::kMaxFieldBits) throw std::invalid_argument("money: n_note must lie in [1, 16]");
    qcore::require_qubits_within_limit(n_note, "money");
    if (L < 1) throw std::invalid_argument("money: L must be >= 1");
    if (!(f_min > 0.5 && f_min < 1.0)) throw std::invalid_argument("money: f_min must lie in (1/2, 1)");
    if (!(eta > 0.0 && eta < 1.0 - f_min)) throw std::invalid_argument("money: eta must lie in (0, 1 - f_min)");
    if (serial_bits < 1) throw std::invalid_argument("money: serial_bits must be >= 1");
    if (note_key_bits < 1) throw std::invalid_argument("money: note_key_bits must be >= 1");
}

int MoneyConfig::threshold() const {
    // (0.6 + 0.05) * 200 evaluates to 130.00000000000003.
    return static_cast<int>(std::ceil((f_min + eta) * L - 1e-9));
}

double MoneyConfig::chernoff_bound() const { return std::exp(-L * eta * eta / (3.0 * f_min)); }

pseudostates::PrfSpec MoneyConfig::note_prf() const {
    return prf == pseudostates::PrfKind::keyed_hash ? pseudostates::PrfSpec::keyed_hash(n_note)
                                                    : pseudostates::PrfSpec::polynomial(n_note);
}

// --------------------------------------------------------------- NoteState

NoteState NoteState::pure(PureState psi) {
    NoteState s(psi.num_qubits());
    s.pure_parts_.emplace_back(1.0, std::move(psi));
    return s;
}

NoteState NoteState::maximally_mixed(int n) {
    NoteState s(n);
    s.identity_weight_ = 1.0;
    return s;
}

NoteState NoteState::dense(const DensityMatrix& rho) {
    NoteState s(rho.num_qubits());
    s.dense_ = rho.matrix();
    return s;
}

double NoteState::fidelity(const PureState& psi) const {
    if (psi.num_qubits() != n_) throw std::invalid_argument("NoteState::fidelity: dimension mismatch");
    double f = identity_weight_ / static_cast<double>(qcore::dim_of(n_));
    for (const auto& [w, phi] : pure_parts_) f += w * std::norm(psi.inner(phi));
    if (dense_.size() > 0) {
        const auto& v = psi.amplitudes();
        f += (v.adjoint() * dense_ * v)(0, 0).real();
    }
    return std::clamp(f, 0.0, 1.0);
}

std::vector<double> NoteState::basis_probabilities() const {
    const std::size_t d = qcore::dim_of(n_);
    std::vector<double> p(d, identity_weight_ / static_cast<double>(d));
    for (const auto& [w, phi] : pure_parts_) {
        for (std::size_t x = 0; x < d; ++x) p[x] += w * std::norm(phi[x]);
    }
    if (dense_.size() > 0) {
        for (std::size_t x = 0; x < d; ++x) p[x] += dense_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)).real();
    }
    return p;
}

DensityMatrix NoteState::to_density() const {
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n_));
    ComplexMatrix m = dense_.size() > 0 ? dense_ : ComplexMatrix::Zero(d, d);
    m.diagonal().array() += identity_weight_ / static_cast<double>(d);
    for (const auto& [w, phi] : pure_parts_) m += w * (phi.amplitudes() * phi.amplitudes().adjoint());
    return DensityMatrix::from_trusted(n_, std::move(m));
}

NoteState NoteState::transported(const channels::Channel& channel) const {
    if (channels::num_qubits(channel) != n_) throw std::invalid_argument("transport: channel dimension mismatch");
    if (const auto* g = std::get_if<channels::GlobalDepolarizing>(&channel)) {
        NoteState out = *this;
        const double keep = 1.0 - g->p;
        out.identity_weight_ = keep * identity_weight_ + g->p;
        for (auto& part : out.pure_parts_) part.first *= keep;
        if (out.dense_.size() > 0) out.dense_ *= keep;
        return out;
    }
    return dense(channels::apply(channel, to_density()));
}

// ---------------------------------------------------------------- minting

Key note_key(const MoneyConfig& cfg, const Serial& serial, int index) {
    const std::string label = "note-key:" + serial.to_hex() + ":" + std::to_string(index);
    const auto nbytes = static_cast<std::size_t>((cfg.note_key_bits + 7) / 8);
    std::vector<std::uint8_t> bytes(nbytes, 0);
    for (std::size_t b = 0; b < nbytes; ++b) {
        if (b % 8 == 0) {
            const std::uint64_t word = pseudostates::keyed_digest(cfg.master_key, label, b / 8);
            for (std::size_t k = 0; k < 8 && b + k < nbytes; ++k) bytes[b + k] = static_cast<std::uint8_t>(word >> (8 * k));
        }
    }
    if (cfg.note_key_bits % 8 != 0) bytes.back() &= static_cast<std::uint8_t>((1u << (cfg.note_key_bits % 8)) - 1u);
    return Key(std::move(bytes), cfg.note_key_bits);
}

PureState reference_state(const MoneyConfig& cfg, const Serial& serial, int index) {
    if (cfg.family == NoteFamily::computational_zero) return PureState(cfg.n_note);
    return pseudostates::binary_phase_state(note_key(cfg, serial, index), cfg.note_prf(), cfg.n_note);
}

Banknote mint(const MoneyConfig& cfg, const Serial& serial) {
    cfg.validate();
    if (serial.kappa() != cfg.serial_bits) throw std::invalid_argument("mint: serial length differs from serial_bits");
    Banknote b;
    b.scheme = Scheme::single_serial;
    b.serial = serial;
    b.notes.reserve(static_cast<std::size_t>(cfg.L));
    for (int i = 0; i < cfg.L; ++i) b.notes.push_back(NoteState::pure(reference_state(cfg, serial, i)));
    return b;
}

Banknote mint_per_note_serial(const MoneyConfig& cfg, const std::vector<Serial>& serials) {
    cfg.validate();
    if (serials.size() != static_cast<std::size_t>(cfg.L)) throw std::invalid_argument("mint: need one serial per note");
    Banknote b;
    b.scheme = Scheme::per_note_serial;
    b.note_serials = serials;
    b.notes.reserve(serials.size());
    for (int i = 0; i < cfg.L; ++i) {
        const auto& s = serials[static_cast<std::size_t>(i)];
        if (s.kappa() != cfg.serial_bits) throw std::invalid_argument("mint: serial length differs from serial_bits");
        b.notes.push_back(NoteState::pure(reference_state(cfg, s, i)));
    }
    return b;
}

Serial random_serial(const MoneyConfig& cfg, Rng& rng) { return Key::random(cfg.serial_bits, rng); }

Banknote transport(const Banknote& note, const channels::Channel& channel) {
    Banknote out = note;
    for (auto& n : out.notes) n = n.transported(channel);
    return out;
}

// ------------------------------------------------------------ verification

std::vector<double> note_fidelities(const MoneyConfig& cfg, const Banknote& banknote) {
    if (banknote.notes.size() != static_cast<std::size_t>(cfg.L)) throw std::invalid_argument("verify: banknote has the wrong length");
    const bool per_note = banknote.scheme == Scheme::per_note_serial;
    if (per_note != !banknote.note_serials.empty() ||
        (per_note && banknote.note_serials.size() != banknote.notes.size())) {
        throw std::invalid_argument("verify: serial layout does not match the banknote scheme");
    }
    std::vector<double> f(banknote.notes.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (banknote.notes[i].num_qubits() != cfg.n_note) throw std::invalid_argument("verify: note has the wrong size");
        const auto& s = per_note ? banknote.note_serials[i] : banknote.serial;
        f[i] = banknote.notes[i].fidelity(reference_state(cfg, s, static_cast<int>(i)));
    }
    return f;
}

VerifyResult verify(const MoneyConfig& cfg, const Banknote& banknote, RngSeed seed) {
    const auto f = note_fidelities(cfg, banknote);
    Rng rng(seed);
    VerifyResult r;
    for (double p : f) r.successes += rng.bernoulli(p) ? 1 : 0;
    r.accepted = r.successes >= cfg.threshold();
    return r;
}

double acceptance_probability(const MoneyConfig& cfg, const Banknote& banknote) {
    return poisson_binomial_upper_tail(note_fidelities(cfg, banknote), cfg.threshold());
}

double poisson_binomial_upper_tail(const std::vector<double>& p, int k) {
    if (k <= 0) return 1.0;
    if (static_cast<std::size_t>(k) > p.size()) return 0.0;
    std::vector<double> dist(p.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j > 0; --j) dist[j] = dist[j] * (1.0 - p[i]) + dist[j - 1] * p[i];
        dist[0] *= 1.0 - p[i];
    }
    double tail = 0.0;
    for (std::size_t j = static_cast<std::size_t>(k); j < dist.size(); ++j) tail += dist[j];
    return std::clamp(tail, 0.0, 1.0);
}

double binomial_upper_tail(int n, double p, int k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double tail = 0.0;
    for (int j = k; j <= n; ++j) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                                j * std::log(p) + (n - j) * std::log1p(-p);
        tail += std::exp(log_term);
    }
    return std::min(1.0, tail);
}

// ------------------------------------------------------------- experiments

namespace {

double rate(const std::vector<std::uint8_t>& hits) {
    std::size_t s = 0;
    for (auto h : hits) s += h;
    return hits.empty() ? 0.0 : static_cast<double>(s) / static_cast<double>(hits.size());
}

}  // namespace

CompletenessResult completeness_experiment(const MoneyConfig& cfg, const channels::Channel& channel, std::size_t trials,
                                           std::uint64_t seed) {
    cfg.validate();
    if (trials == 0) throw std::invalid_argument("completeness_experiment: need at least one trial");
    const std::uint64_t serial_seed = derive_seed(seed, "money/serial");
    const std::uint64_t verify_seed = derive_seed(seed, "money/verify");
    auto noisy_banknote = [&](std::size_t i) {
        Rng rng({serial_seed, i});
        return transport(mint(cfg, random_serial(cfg, rng)), channel);
    };

    CompletenessResult r;
    r.trials = trials;
    r.chernoff_bound = cfg.chernoff_bound();
    const auto probe = noisy_banknote(0);
    const auto f = note_fidelities(cfg, probe);
    r.min_fidelity = *std::min_element(f.begin(), f.end());
    r.assumption_violated = r.min_fidelity < cfg.f_min + cfg.eta - 1e-12;
    r.exact_error = 1.0 - poisson_binomial_upper_tail(f, cfg.threshold());

    std::vector<std::uint8_t> rejected(trials, 0);
    parallel_for(trials, [&](std::size_t i) {
        rejected[i] = verify(cfg, noisy_banknote(i), {verify_seed, i}).accepted ? 0 : 1;
    });
    r.empirical_error = rate(rejected);
    r.std_error = std::sqrt(r.empirical_error * (1.0 - r.empirical_error) / static_cast<double>(trials));
    return r;
}

EmbezzleResult embezzle_attack(const MoneyConfig& cfg, Scheme scheme, int victims, std::size_t trials,
                               std::uint64_t seed) {
    cfg.validate();
    if (victims < cfg.L) throw std::invalid_argument("embezzle_attack: need at least L victims");
    if (trials == 0) throw std::invalid_argument("embezzle_attack: need at least one trial");
    Rng rng({derive_seed(seed, "embezzle/pool"), 0});

    std::vector<Banknote> pool;
    pool.reserve(static_cast<std::size_t>(victims));
    for (int v = 0; v < victims; ++v) {
        if (scheme == Scheme::single_serial) {
            pool.push_back(mint(cfg, random_serial(cfg, rng)));
        } else {
            std::vector<Serial> serials;
            for (int i = 0; i < cfg.L; ++i) serials.push_back(random_serial(cfg, rng));
            pool.push_back(mint_per_note_serial(cfg, serials));
        }
    }

    Banknote counterfeit;
    counterfeit.scheme = scheme;
    if (scheme == Scheme::single_serial) counterfeit.serial = random_serial(cfg, rng);
    const auto junk = NoteState::maximally_mixed(cfg.n_note);
    for (int v = 0; v < cfg.L; ++v) {
        auto& victim = pool[static_cast<std::size_t>(v)];
        counterfeit.notes.push_back(victim.notes[static_cast<std::size_t>(v)]);
        if (scheme == Scheme::per_note_serial) counterfeit.note_serials.push_back(victim.note_serials[static_cast<std::size_t>(v)]);
        victim.notes[static_cast<std::size_t>(v)] = junk;
    }

    EmbezzleResult r;
    r.trials = trials;
    r.counterfeit_accept_exact = acceptance_probability(cfg, counterfeit);
    r.victims_still_valid_exact = 1.0;
    for (int v = 0; v < cfg.L; ++v) {
        r.victims_still_valid_exact = std::min(r.victims_still_valid_exact, acceptance_probability(cfg, pool[static_cast<std::size_t>(v)]));
    }

    const std::uint64_t cf_seed = derive_seed(seed, "embezzle/counterfeit");
    const std::uint64_t victim_seed = derive_seed(seed, "embezzle/victim");
    std::vector<std::uint8_t> cf_ok(trials, 0), victim_ok(trials, 0);
    parallel_for(trials, [&](std::size_t i) {
        cf_ok[i] = verify(cfg, counterfeit, {cf_seed, i}).accepted ? 1 : 0;
        const auto& victim = pool[i % static_cast<std::size_t>(cfg.L)];
        victim_ok[i] = verify(cfg, victim, {victim_seed, i}).accepted ? 1 : 0;
    });
    r.counterfeit_accept_rate = rate(cf_ok);
    r.victims_still_valid_rate = rate(victim_ok);
    return r;
}

CloneResult clone_attack(const MoneyConfig& cfg, std::size_t trials, std::uint64_t seed) {
    cfg.validate();
    if (trials == 0) throw std::invalid_argument("clone_attack: need at least one trial");
    const std::uint64_t serial_seed = derive_seed(seed, "clone/serial");
    const std::uint64_t measure_seed = derive_seed(seed, "clone/measure");
    const std::uint64_t verify_seed = derive_seed(seed, "clone/verify");

    auto cloned = [&](std::size_t i) {
        Rng srng({serial_seed, i});
        const auto original = mint(cfg, random_serial(cfg, srng));
        Rng mrng({measure_seed, i});
        Banknote copy = original;
        for (auto& note : copy.notes) {
            const auto p = note.basis_probabilities();
            const double u = mrng.uniform();
            double acc = 0.0;
            std::size_t x = p.size() - 1;
            for (std::size_t k = 0; k < p.size(); ++k) {
                acc += p[k];
                if (u < acc) {
                    x = k;
                    break;
                }
            }
            note = NoteState::pure(PureState::basis(cfg.n_note, x));
        }
        return copy;
    };

    CloneResult r;
    r.trials = trials;
    const auto probe = cloned(0);
    const auto f = note_fidelities(cfg, probe);
    double sum = 0.0;
    for (double v : f) sum += v;
    r.mean_note_fidelity = sum / static_cast<double>(f.size());
    r.exact_acceptance = poisson_binomial_upper_tail(f, cfg.threshold());

    std::vector<std::uint8_t> ok(trials, 0);
    parallel_for(trials, [&](std::size_t i) { ok[i] = verify(cfg, cloned(i), {verify_seed, i}).accepted ? 1 : 0; });
    r.acceptance_rate = rate(ok);
    return r;
}

}  // namespace prdm::qmoney
