#include "prdm/pseudostates.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>

#include <sodium.h>

namespace prdm::pseudostates {

using qcore::Complex;
using qcore::ComplexMatrix;
using qcore::ComplexVector;
using qcore::DensityMatrix;
using qcore::PureState;

namespace {

void ensure_sodium() {
    static const bool ok = [] { return sodium_init() >= 0; }();
    if (!ok) throw std::runtime_error("libsodium failed to initialize");
}

std::array<unsigned char, 16> derive_sip_key(const Key& key) {
    ensure_sodium();
    std::vector<unsigned char> msg(key.bytes().begin(), key.bytes().end());
    const auto kappa = static_cast<std::uint32_t>(key.kappa());
    for (int b = 0; b < 4; ++b) msg.push_back(static_cast<unsigned char>(kappa >> (8 * b)));
    std::array<unsigned char, 16> out{};
    crypto_generichash(out.data(), out.size(), msg.data(), msg.size(), nullptr, 0);
    return out;
}

std::uint64_t siphash(const std::array<unsigned char, 16>& sip_key, const unsigned char* msg,
                      std::size_t len) {
    unsigned char out[crypto_shorthash_siphash24_BYTES];
    crypto_shorthash_siphash24(out, msg, len, sip_key.data());
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | out[b];
    return v;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::size_t bytes_for(int kappa) { return static_cast<std::size_t>((kappa + 7) / 8); }

}  // namespace

// ---------------------------------------------------------------------- Key

Key::Key(std::vector<std::uint8_t> bytes, int kappa) : bytes_(std::move(bytes)), kappa_(kappa) {
    if (kappa < 1) throw std::invalid_argument("Key: kappa must be >= 1");
    if (bytes_.size() != bytes_for(kappa)) throw std::invalid_argument("Key: byte length does not match kappa");
    if (kappa % 8 != 0) {
        const auto mask = static_cast<std::uint8_t>((1u << (kappa % 8)) - 1u);
        if ((bytes_.back() & ~mask) != 0) throw std::invalid_argument("Key: bits set beyond kappa");
    }
}

Key Key::random(int kappa, Rng& rng) {
    if (kappa < 1) throw std::invalid_argument("Key: kappa must be >= 1");
    std::vector<std::uint8_t> bytes(bytes_for(kappa));
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next_u64() & 0xffu);
    if (kappa % 8 != 0) bytes.back() &= static_cast<std::uint8_t>((1u << (kappa % 8)) - 1u);
    return Key(std::move(bytes), kappa);
}

Key Key::from_index(std::uint64_t value, int kappa) {
    if (kappa < 1 || kappa > 64) throw std::invalid_argument("Key::from_index: kappa must lie in [1, 64]");
    if (kappa < 64 && (value >> kappa) != 0) throw std::invalid_argument("Key::from_index: value exceeds kappa bits");
    std::vector<std::uint8_t> bytes(bytes_for(kappa));
    for (std::size_t b = 0; b < bytes.size(); ++b) bytes[b] = static_cast<std::uint8_t>(value >> (8 * b));
    return Key(std::move(bytes), kappa);
}

Key Key::zero(int kappa) {
    if (kappa < 1) throw std::invalid_argument("Key: kappa must be >= 1");
    return Key(std::vector<std::uint8_t>(bytes_for(kappa), 0), kappa);
}

Key Key::from_hex(std::string_view hex, int kappa) {
    if (kappa < 1) throw std::invalid_argument("Key: kappa must be >= 1");
    if (hex.size() != 2 * bytes_for(kappa)) throw std::invalid_argument("Key::from_hex: wrong hex length for kappa");
    std::vector<std::uint8_t> bytes(bytes_for(kappa));
    for (std::size_t b = 0; b < bytes.size(); ++b) {
        const int hi = hex_value(hex[2 * b]);
        const int lo = hex_value(hex[2 * b + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("Key::from_hex: invalid hex digit");
        bytes[b] = static_cast<std::uint8_t>(hi * 16 + lo);
    }
    return Key(std::move(bytes), kappa);
}

bool Key::bit(int i) const {
    if (i < 0 || i >= kappa_) throw std::out_of_range("Key::bit: index out of range");
    return (bytes_[static_cast<std::size_t>(i / 8)] >> (i % 8)) & 1u;
}

std::uint64_t Key::bits(int offset, int width) const {
    if (width < 0 || width > 64 || offset < 0 || offset + width > kappa_) {
        throw std::out_of_range("Key::bits: range out of bounds");
    }
    std::uint64_t v = 0;
    for (int j = 0; j < width; ++j) v |= static_cast<std::uint64_t>(bit(offset + j)) << j;
    return v;
}

std::string Key::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * bytes_.size());
    for (auto b : bytes_) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

// ------------------------------------------------------------------ PrfSpec

PrfSpec PrfSpec::keyed_hash(int domain_bits) {
    PrfSpec s{PrfKind::keyed_hash, 7, domain_bits};
    s.validate();
    return s;
}

PrfSpec PrfSpec::polynomial(int domain_bits, int degree) {
    PrfSpec s{PrfKind::kwise_polynomial, degree, domain_bits};
    s.validate();
    return s;
}

void PrfSpec::validate() const {
    if (domain_bits < 1 || domain_bits > 62) throw std::invalid_argument("PrfSpec: domain_bits must lie in [1, 62]");
    if (kind == PrfKind::kwise_polynomial) {
        if (degree < 1) throw std::invalid_argument("PrfSpec: polynomial degree must be >= 1");
        if (domain_bits > kMaxFieldBits) throw std::invalid_argument("PrfSpec: polynomial kind supports at most 16 domain bits");
    }
}

std::string to_string(PrfKind kind) {
    return kind == PrfKind::keyed_hash ? "keyed-hash" : "k-wise-polynomial";
}

PrfKind prf_kind_from_string(std::string_view s) {
    if (s == "keyed-hash") return PrfKind::keyed_hash;
    if (s == "k-wise-polynomial" || s == "polynomial") return PrfKind::kwise_polynomial;
    throw std::invalid_argument("unknown PRF kind: " + std::string(s));
}

// -------------------------------------------------------------- GF(2^w)

std::uint32_t field_modulus(int w) {
    // Low-weight irreducible polynomials; index = field degree.
    static constexpr std::uint32_t table[kMaxFieldBits + 1] = {
        0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x83,    0x11B,
        0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
    };
    if (w < 1 || w > kMaxFieldBits) throw std::out_of_range("field_modulus: field size out of range");
    return table[w];
}

std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, int w) {
    std::uint64_t product = 0;
    for (int i = 0; i < w; ++i) {
        if ((b >> i) & 1u) product ^= static_cast<std::uint64_t>(a) << i;
    }
    const std::uint64_t modulus = field_modulus(w);
    for (int deg = 2 * w - 2; deg >= w; --deg) {
        if ((product >> deg) & 1u) product ^= modulus << (deg - w);
    }
    return static_cast<std::uint32_t>(product);
}

// --------------------------------------------------------------------- Prf

std::uint64_t keyed_digest(const Key& key, std::string_view label, std::uint64_t counter) {
    const auto sip_key = derive_sip_key(key);
    std::vector<unsigned char> msg(label.begin(), label.end());
    msg.push_back(0);
    for (int b = 0; b < 8; ++b) msg.push_back(static_cast<unsigned char>(counter >> (8 * b)));
    return siphash(sip_key, msg.data(), msg.size());
}

Prf::Prf(const Key& key, const PrfSpec& spec) : spec_(spec) {
    spec_.validate();
    sip_key_ = derive_sip_key(key);
    if (spec_.kind == PrfKind::kwise_polynomial) {
        const int w = spec_.domain_bits;
        const std::uint32_t mask = (w == 32) ? ~0u : ((1u << w) - 1u);
        coeffs_.resize(static_cast<std::size_t>(spec_.degree + 1));
        // A key long enough to hold every coefficient is read directly, which
        // makes the family exactly (degree+1)-wise independent over uniform keys.
        const bool direct = key.kappa() >= (spec_.degree + 1) * w;
        for (int j = 0; j <= spec_.degree; ++j) {
            coeffs_[static_cast<std::size_t>(j)] =
                direct ? static_cast<std::uint32_t>(key.bits(j * w, w))
                       : static_cast<std::uint32_t>(keyed_digest(key, "poly-coef", static_cast<std::uint64_t>(j))) & mask;
        }
    }
}

int Prf::operator()(std::uint64_t x) const {
    if (spec_.domain_bits < 64 && (x >> spec_.domain_bits) != 0) {
        throw std::invalid_argument("prf_eval: input longer than domain_bits");
    }
    if (spec_.kind == PrfKind::keyed_hash) {
        unsigned char msg[9];
        for (int b = 0; b < 8; ++b) msg[b] = static_cast<unsigned char>(x >> (8 * b));
        msg[8] = static_cast<unsigned char>(spec_.domain_bits);
        return static_cast<int>(siphash(sip_key_, msg, sizeof msg) & 1u);
    }
    const int w = spec_.domain_bits;
    const auto xv = static_cast<std::uint32_t>(x);
    std::uint32_t acc = coeffs_.back();
    for (int j = spec_.degree - 1; j >= 0; --j) acc = gf_mul(acc, xv, w) ^ coeffs_[static_cast<std::size_t>(j)];
    return static_cast<int>(acc & 1u);
}

int prf_eval(const Key& key, const PrfSpec& spec, std::uint64_t x) {
    return Prf(key, spec)(x);
}

// -------------------------------------------------------- states and PRDMs

std::vector<std::int8_t> binary_phase_signs(const Key& key, const PrfSpec& spec, int total_qubits) {
    qcore::require_qubits_within_limit(total_qubits, "binary_phase_state");
    if (spec.domain_bits != total_qubits) {
        throw std::invalid_argument("binary_phase_state: PRF domain_bits must equal the qubit count");
    }
    const Prf prf(key, spec);
    const std::size_t d = qcore::dim_of(total_qubits);
    std::vector<std::int8_t> signs(d);
    for (std::size_t x = 0; x < d; ++x) signs[x] = prf(x) ? std::int8_t{-1} : std::int8_t{1};
    return signs;
}

PureState binary_phase_state(const Key& key, const PrfSpec& spec, int total_qubits) {
    const auto signs = binary_phase_signs(key, spec, total_qubits);
    const double amp = std::pow(2.0, -0.5 * total_qubits);
    ComplexVector v(static_cast<Eigen::Index>(signs.size()));
    for (std::size_t x = 0; x < signs.size(); ++x) v[static_cast<Eigen::Index>(x)] = amp * signs[x];
    return PureState(total_qubits, std::move(v));
}

DensityMatrix make_prdm(const Key& key, const PrfSpec& spec, int n, int m) {
    if (n < 1 || m < 0) throw std::invalid_argument("make_prdm: need n >= 1 and m >= 0");
    const auto signs = binary_phase_signs(key, spec, n + m);
    const auto da = static_cast<Eigen::Index>(qcore::dim_of(n));
    const auto db = static_cast<Eigen::Index>(qcore::dim_of(m));
    Eigen::MatrixXd s(da, db);
    for (Eigen::Index a = 0; a < da; ++a) {
        for (Eigen::Index b = 0; b < db; ++b) s(a, b) = signs[static_cast<std::size_t>(a * db + b)];
    }
    // Integer-valued product; scaling by a power of two is exact.
    Eigen::MatrixXd gram = s * s.transpose();
    gram *= std::ldexp(1.0, -(n + m));
    return DensityMatrix::from_trusted(n, gram.cast<Complex>());
}

namespace {

void apply_single_qubit(ComplexMatrix& u, int n, int qubit, const Eigen::Matrix2cd& g) {
    const std::size_t bit = std::size_t{1} << (n - 1 - qubit);
    const std::size_t d = qcore::dim_of(n);
    for (std::size_t i = 0; i < d; ++i) {
        if (i & bit) continue;
        const auto i0 = static_cast<Eigen::Index>(i);
        const auto i1 = static_cast<Eigen::Index>(i | bit);
        const Eigen::RowVectorXcd r0 = u.row(i0);
        const Eigen::RowVectorXcd r1 = u.row(i1);
        u.row(i0) = g(0, 0) * r0 + g(0, 1) * r1;
        u.row(i1) = g(1, 0) * r0 + g(1, 1) * r1;
    }
}

void apply_cz(ComplexMatrix& u, int n, int q0, int q1) {
    const std::size_t b0 = std::size_t{1} << (n - 1 - q0);
    const std::size_t b1 = std::size_t{1} << (n - 1 - q1);
    for (std::size_t i = 0; i < qcore::dim_of(n); ++i) {
        if ((i & b0) && (i & b1)) u.row(static_cast<Eigen::Index>(i)) *= -1.0;
    }
}

Eigen::Matrix2cd rotation(double alpha, double beta, double gamma) {
    using std::exp;
    const Complex i{0.0, 1.0};
    Eigen::Matrix2cd rz_a, ry_b, rz_g;
    rz_a << exp(-i * alpha / 2.0), 0.0, 0.0, exp(i * alpha / 2.0);
    ry_b << std::cos(beta / 2.0), -std::sin(beta / 2.0), std::sin(beta / 2.0), std::cos(beta / 2.0);
    rz_g << exp(-i * gamma / 2.0), 0.0, 0.0, exp(i * gamma / 2.0);
    return rz_a * ry_b * rz_g;
}

}  // namespace

ComplexMatrix keyed_random_circuit(const Key& key, int n, int depth) {
    if (n < 1) throw std::invalid_argument("keyed_random_circuit: n must be >= 1");
    if (depth < 0) throw std::invalid_argument("keyed_random_circuit: depth must be >= 0");
    qcore::require_qubits_within_limit(n, "keyed_random_circuit");
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    Rng rng(RngSeed{keyed_digest(key, "brickwork", static_cast<std::uint64_t>(n)), 0});
    const double two_pi = 2.0 * std::numbers::pi;
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = 0; q < n; ++q) {
            const double a = two_pi * rng.uniform();
            const double b = two_pi * rng.uniform();
            const double c = two_pi * rng.uniform();
            apply_single_qubit(u, n, q, rotation(a, b, c));
        }
        for (int q = layer % 2; q + 1 < n; q += 2) apply_cz(u, n, q, q + 1);
    }
    return u;
}

DensityMatrix vprdm_make(const Key& key, int n, int m, int depth) {
    if (m < 0 || m >= n) throw std::invalid_argument("vprdm_make: need 0 <= m < n");
    const auto d = static_cast<Eigen::Index>(qcore::dim_of(n));
    const auto db = static_cast<Eigen::Index>(qcore::dim_of(m));
    // |0..0> on the leading n-m qubits occupies the first 2^m basis indices.
    ComplexMatrix rho0 = ComplexMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < db; ++b) rho0(b, b) = 1.0 / static_cast<double>(db);
    const ComplexMatrix u = keyed_random_circuit(key, n, depth);
    return qcore::conjugate(u, DensityMatrix::from_trusted(n, std::move(rho0)));
}

double vprdm_verify(const DensityMatrix& rho, const Key& key, int m, int depth) {
    const int n = rho.num_qubits();
    if (m < 0 || m >= n) throw std::invalid_argument("vprdm_verify: need 0 <= m < n");
    const ComplexMatrix u = keyed_random_circuit(key, n, depth);
    const DensityMatrix rotated = qcore::conjugate(u.adjoint(), rho);
    // <0..0| tr_m(sigma) |0..0> sums the first 2^m diagonal entries of sigma.
    const auto db = static_cast<Eigen::Index>(qcore::dim_of(m));
    double p = 0.0;
    for (Eigen::Index b = 0; b < db; ++b) p += rotated.matrix()(b, b).real();
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace prdm::pseudostates
