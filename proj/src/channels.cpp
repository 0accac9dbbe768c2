#include "prdm/channels.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace prdm::channels {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::DensityMatrix;

namespace {

void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": p must lie in [0, 1]");
}

void require_dims(int channel_qubits, const DensityMatrix& rho) {
    if (channel_qubits != rho.num_qubits()) throw std::invalid_argument("apply: channel and state dimensions differ");
}

DensityMatrix hermitize(int n, ComplexMatrix m) {
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityMatrix::from_trusted(n, std::move(m));
}

// rho -> (1-p) rho + p (I/2 on `qubit`) (x) tr_qubit(rho), in place.
void depolarize_qubit(ComplexMatrix& rho, int n, int qubit, double p) {
    const auto bit = static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - qubit));
    const Eigen::Index d = rho.rows();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (j & bit) continue;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (i & bit) continue;
            const Complex a00 = rho(i, j);
            const Complex a11 = rho(i | bit, j | bit);
            const Complex avg = 0.5 * (a00 + a11);
            rho(i, j) = (1.0 - p) * a00 + p * avg;
            rho(i | bit, j | bit) = (1.0 - p) * a11 + p * avg;
            rho(i | bit, j) *= (1.0 - p);
            rho(i, j | bit) *= (1.0 - p);
        }
    }
}

}  // namespace

MixedUnitaryChannel::MixedUnitaryChannel(int num_qubits, std::vector<MixedUnitaryTerm> terms)
    : num_qubits_(num_qubits), terms_(std::move(terms)) {
    if (num_qubits < 1) throw std::invalid_argument("MixedUnitaryChannel: need at least one qubit");
    if (terms_.empty()) throw std::invalid_argument("MixedUnitaryChannel: no terms");
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(num_qubits));
    double total = 0.0;
    for (const auto& t : terms_) {
        if (!(t.probability >= 0.0)) throw std::invalid_argument("MixedUnitaryChannel: negative probability");
        if (t.unitary.rows() != d || t.unitary.cols() != d) {
            throw std::invalid_argument("MixedUnitaryChannel: unitary has the wrong dimension");
        }
        if (!qcore::is_unitary(t.unitary, 1e-9)) throw std::invalid_argument("MixedUnitaryChannel: term is not unitary");
        total += t.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("MixedUnitaryChannel: probabilities do not sum to 1");
}

std::vector<double> MixedUnitaryChannel::probabilities() const {
    std::vector<double> p;
    p.reserve(terms_.size());
    for (const auto& t : terms_) p.push_back(t.probability);
    return p;
}

KrausChannel::KrausChannel(int num_qubits, std::vector<ComplexMatrix> kraus_ops)
    : num_qubits_(num_qubits), ops_(std::move(kraus_ops)) {
    if (num_qubits < 1) throw std::invalid_argument("KrausChannel: need at least one qubit");
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: no Kraus operators");
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(num_qubits));
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const auto& k : ops_) {
        if (k.rows() != d || k.cols() != d) throw std::invalid_argument("KrausChannel: operator has the wrong dimension");
        sum += k.adjoint() * k;
    }
    if (qcore::max_abs_diff(sum, ComplexMatrix::Identity(d, d)) > 1e-9) {
        throw std::invalid_argument("KrausChannel: operators are not trace preserving");
    }
}

int num_qubits(const Channel& channel) {
    return std::visit(
        [](const auto& c) -> int {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, GlobalDepolarizing> || std::is_same_v<T, LocalDepolarizing>) {
                return c.num_qubits;
            } else {
                return c.num_qubits();
            }
        },
        channel);
}

DensityMatrix apply(const MixedUnitaryChannel& channel, const DensityMatrix& rho) {
    require_dims(channel.num_qubits(), rho);
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& t : channel.terms()) {
        if (t.probability == 0.0) continue;
        if (t.pauli) {
            t.pauli->conjugate_into(rho.matrix(), out, t.probability);
        } else {
            out.noalias() += t.probability * (t.unitary * rho.matrix() * t.unitary.adjoint());
        }
    }
    return hermitize(rho.num_qubits(), std::move(out));
}

DensityMatrix apply(const KrausChannel& channel, const DensityMatrix& rho) {
    require_dims(channel.num_qubits(), rho);
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (const auto& k : channel.kraus_ops()) out.noalias() += k * rho.matrix() * k.adjoint();
    return hermitize(rho.num_qubits(), std::move(out));
}

DensityMatrix apply(const GlobalDepolarizing& channel, const DensityMatrix& rho) {
    require_dims(channel.num_qubits, rho);
    require_probability(channel.p, "depolarizing_global");
    const auto d = static_cast<Eigen::Index>(rho.dim());
    ComplexMatrix out = (1.0 - channel.p) * rho.matrix();
    out.diagonal().array() += channel.p / static_cast<double>(d);
    return hermitize(rho.num_qubits(), std::move(out));
}

DensityMatrix apply(const LocalDepolarizing& channel, const DensityMatrix& rho) {
    require_dims(channel.num_qubits, rho);
    require_probability(channel.p, "depolarizing_local");
    ComplexMatrix m = rho.matrix();
    for (int q = 0; q < channel.num_qubits; ++q) depolarize_qubit(m, channel.num_qubits, q, channel.p);
    return hermitize(rho.num_qubits(), std::move(m));
}

DensityMatrix apply(const Channel& channel, const DensityMatrix& rho) {
    return std::visit([&](const auto& c) { return apply(c, rho); }, channel);
}

MixedUnitaryChannel identity_channel(int n) {
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    MixedUnitaryTerm t{1.0, ComplexMatrix::Identity(d, d), PauliString{n, 0, 0}};
    return MixedUnitaryChannel(n, {std::move(t)});
}

GlobalDepolarizing depolarizing_global(int n, double p) {
    if (n < 1) throw std::invalid_argument("depolarizing_global: need at least one qubit");
    require_probability(p, "depolarizing_global");
    return {n, p};
}

MixedUnitaryChannel depolarizing_local(int n, double p) {
    if (n < 1) throw std::invalid_argument("depolarizing_local: need at least one qubit");
    require_probability(p, "depolarizing_local");
    if (n > kMaxExplicitLocalQubits) {
        throw qcore::LimitExceeded("depolarizing_local: 4^n explicit terms exceed the limit; use the factored path");
    }
    // Per qubit: I with 1-3p/4, X, Y, Z with p/4 each.
    const std::array<double, 4> single{1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p};
    std::vector<MixedUnitaryTerm> terms;
    const std::uint64_t count = std::uint64_t{1} << (2 * n);
    for (std::uint64_t code = 0; code < count; ++code) {
        // Base-4 digit per qubit: 0=I, 1=X, 2=Y, 3=Z; qubit 0 is the leading digit.
        double prob = 1.0;
        std::uint32_t x = 0, z = 0;
        for (int q = 0; q < n; ++q) {
            const auto letter = static_cast<int>((code >> (2 * (n - 1 - q))) & 3u);
            prob *= single[static_cast<std::size_t>(letter)];
            const std::uint32_t bit = 1u << (n - 1 - q);
            if (letter == 1 || letter == 2) x |= bit;
            if (letter == 2 || letter == 3) z |= bit;
        }
        if (prob == 0.0) continue;
        PauliString ps{n, x, z};
        terms.push_back({prob, ps.matrix(), ps});
    }
    return MixedUnitaryChannel(n, std::move(terms));
}

LocalDepolarizing depolarizing_local_factored(int n, double p) {
    if (n < 1) throw std::invalid_argument("depolarizing_local: need at least one qubit");
    require_probability(p, "depolarizing_local");
    return {n, p};
}

MixedUnitaryChannel dephasing_channel(int n) {
    if (n < 1) throw std::invalid_argument("dephasing_channel: need at least one qubit");
    qcore::require_qubits_within_limit(2 * n, "dephasing_channel");
    const std::size_t d = qcore::dim_of(n);
    std::vector<MixedUnitaryTerm> terms;
    terms.reserve(d);
    for (std::size_t z = 0; z < d; ++z) {
        PauliString ps{n, 0, static_cast<std::uint32_t>(z)};
        terms.push_back({1.0 / static_cast<double>(d), ps.matrix(), ps});
    }
    return MixedUnitaryChannel(n, std::move(terms));
}

KrausChannel amplitude_damping(double gamma) {
    require_probability(gamma, "amplitude_damping");
    ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
    ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    k1(0, 1) = std::sqrt(gamma);
    return KrausChannel(1, {k0, k1});
}

double channel_entropy(const MixedUnitaryChannel& channel) {
    const auto p = channel.probabilities();
    return qcore::shannon_entropy(p);
}

double single_qubit_depolarizing_entropy(double p) {
    require_probability(p, "single_qubit_depolarizing_entropy");
    const std::array<double, 4> probs{1.0 - 0.75 * p, 0.25 * p, 0.25 * p, 0.25 * p};
    return qcore::shannon_entropy(probs);
}

double local_depolarizing_entropy(int n, double p) {
    return n * single_qubit_depolarizing_entropy(p);
}

bool is_unital(const Channel& channel, double tolerance) {
    const int n = num_qubits(channel);
    const auto mixed = DensityMatrix::maximally_mixed(n);
    const auto out = apply(channel, mixed);
    return qcore::max_abs_diff(out.matrix(), mixed.matrix()) <= tolerance;
}

}  // namespace prdm::channels
