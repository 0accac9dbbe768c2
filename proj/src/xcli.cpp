#include "prdm/xcli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "prdm/channels.hpp"
#include "prdm/distinguishers.hpp"
#include "prdm/ensembles.hpp"
#include "prdm/monotones.hpp"
#include "prdm/parallel.hpp"
#include "prdm/pseudostates.hpp"
#include "prdm/qcore.hpp"
#include "prdm/qmoney.hpp"

namespace prdm::xcli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

long long parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    }
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument("bad number");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::string> parse_list(const std::string& key, const std::string& text) {
    auto items = split(text, ',');
    if (items.empty()) throw ConfigError("config key '" + key + "': empty list");
    for (const auto& it : items) {
        if (it.empty()) throw ConfigError("config key '" + key + "': empty list element");
    }
    return items;
}

void type_check(const ParamSpec& spec, const std::string& text) {
    switch (spec.type) {
        case ParamType::integer: parse_int(spec.key, text); break;
        case ParamType::real: parse_real(spec.key, text); break;
        case ParamType::boolean: parse_bool(spec.key, text); break;
        case ParamType::text:
            if (text.empty()) throw ConfigError("config key '" + spec.key + "': empty value");
            break;
        case ParamType::int_list:
            for (const auto& v : parse_list(spec.key, text)) parse_int(spec.key, v);
            break;
        case ParamType::real_list:
            for (const auto& v : parse_list(spec.key, text)) parse_real(spec.key, v);
            break;
        case ParamType::text_list: parse_list(spec.key, text); break;
    }
}

std::vector<ExperimentSchema> build_schemas() {
    using T = ParamType;
    return {
        {"ghse-moments", "exact t-copy trace distance to the maximally mixed state vs the analytic envelope",
         {{"n", T::int_list, "1,2,3", "visible qubits"},
          {"m", T::int_list, "0,1,2,3,4,5", "traced-out qubits"},
          {"t", T::int_list, "2", "copies"}}},
        {"resources", "coherence, hashing bound and log-robustness of GHSE and PRDM samples",
         {{"samples", T::integer, "200", "samples per coherence/hashing point"},
          {"coherence", T::text_list, "5:1,6:2", "n:m points"},
          {"hashing", T::text_list, "6:1:3", "n:m:n_A points"},
          {"magic", T::text_list, "1:0,1:1,2:0,2:1", "n:m points with n+m <= 3"},
          {"magic_samples", T::integer, "20", "samples per magic point"},
          {"samplers", T::text_list, "ghse,prdm", "ghse and/or prdm"},
          {"control", T::boolean, "true", "emit maximally mixed control rows"}}},
        {"noise-robustness", "purity-attack advantage against noisy PRDMs",
         {{"n", T::integer, "4", "qubits"},
          {"m", T::int_list, "0,2,4,6", "mixedness values"},
          {"p", T::real_list, "0,0.1,0.2", "noise strengths"},
          {"noise", T::text, "local", "local or global depolarizing"},
          {"sampler", T::text, "prdm", "prdm or ghse"},
          {"trials", T::integer, "10000", "SWAP tests per hypothesis"},
          {"exact_samples", T::integer, "500", "samples for the noiseless expected gap"}}},
        {"efi", "EFI statistical gap over exhaustive key averages and the noise entropy budget",
         {{"n", T::int_list, "3,5", "qubits of the key-averaged state"},
          {"m", T::int_list, "1", "mixedness"},
          {"kappa", T::int_list, "2,4,6", "key bits (<= 12)"},
          {"c", T::real, "0.0001", "key-rate constant"},
          {"budget_n", T::integer, "100", "n for the entropy budget"},
          {"budget_m", T::integer, "10", "m for the entropy budget"},
          {"p", T::real_list, "0.2,0.25", "local depolarizing strengths for the budget"}}},
        {"money", "completeness sweep and counterfeiting attacks on the quantum money scheme",
         {{"n_note", T::integer, "8", "qubits per note"},
          {"L", T::int_list, "25,50,100,200", "notes per banknote for the completeness sweep"},
          {"f_min", T::real, "0.6", "assumed minimum note fidelity (sweep)"},
          {"eta", T::real, "0.05", "threshold slack (sweep)"},
          {"noise", T::text, "global", "global or local depolarizing"},
          {"p", T::real, "0.3", "noise strength"},
          {"trials", T::integer, "1000", "banknotes per sweep point"},
          {"attack_L", T::integer, "64", "notes per banknote for attacks"},
          {"attack_f_min", T::real, "0.75", "assumed F_min for attacks"},
          {"attack_eta", T::real, "0.05", "slack for attacks"},
          {"victims", T::integer, "64", "victim banknotes in the embezzling attack"},
          {"attack_trials", T::integer, "1000", "verification trials per attack"},
          {"master_key", T::text, "5f1e3a7c9b2d4f60718293a4b5c6d7e8", "128-bit master key, hex"},
          {"prf", T::text, "keyed-hash", "keyed-hash or k-wise-polynomial"},
          {"serial_bits", T::integer, "32", "serial length"}}},
        {"memoryless", "single-copy learners against Haar vs maximally mixed",
         {{"n", T::integer, "3", "qubits"},
          {"copies", T::int_list, "0,8,32", "copies per trial"},
          {"trials", T::integer, "2000", "evaluation trials per hypothesis"},
          {"calibration_trials", T::integer, "2000", "calibration trials per hypothesis"},
          {"policies", T::text_list, "computational,haar-basis,transcript-greedy", "measurement policies"},
          {"control", T::boolean, "true", "emit the |0> vs I/2 control"},
          {"control_copies", T::integer, "8", "copies for the control"}}},
        {"selftest", "fast invariant checks across all modules", {}},
    };
}

std::string fmt_int(long long v) { return std::to_string(v); }

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Collects rows for one experiment; params are keyed by column name.
class RowSink {
public:
    RowSink(RunResult& r, std::vector<std::string> columns) : r_(r) {
        r_.param_columns = std::move(columns);
        std::erase_if(r_.fixed_params, [&](const auto& kv) {
            return std::find(r_.param_columns.begin(), r_.param_columns.end(), kv.first) != r_.param_columns.end();
        });
    }

    void add(const std::map<std::string, std::string>& params, const std::string& metric, double value,
             std::optional<double> se, double wall) {
        ResultRow row;
        for (const auto& c : r_.param_columns) {
            const auto it = params.find(c);
            row.params.push_back(it == params.end() ? "" : it->second);
        }
        row.metric = metric;
        row.value = value;
        row.std_error = se;
        row.wall_time_s = wall;
        r_.rows.push_back(std::move(row));
    }

private:
    RunResult& r_;
};

RunResult start(const ExperimentConfig& cfg) {
    RunResult r;
    r.experiment = cfg.experiment;
    r.seed = cfg.seed;
    for (const auto& p : schema_for(cfg.experiment).params) {
        const bool scalar = p.type == ParamType::integer || p.type == ParamType::real || p.type == ParamType::text ||
                            p.type == ParamType::boolean;
        if (scalar) r.fixed_params.emplace_back(p.key, cfg.values.at(p.key));
    }
    return r;
}

std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(v.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

std::vector<int> parse_point(const std::string& key, const std::string& text, std::size_t arity) {
    const auto parts = split(text, ':');
    if (parts.size() != arity) {
        throw ConfigError("config key '" + key + "': point '" + text + "' needs " + std::to_string(arity) + " fields");
    }
    std::vector<int> out;
    for (const auto& p : parts) out.push_back(static_cast<int>(parse_int(key, p)));
    return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("config key '" + key + "': " + what);
}

std::string pseed(std::uint64_t seed) { return std::to_string(seed); }

}  // namespace

// ------------------------------------------------------------------ config

const std::vector<ExperimentSchema>& schemas() {
    static const std::vector<ExperimentSchema> s = build_schemas();
    return s;
}

const ExperimentSchema& schema_for(const std::string& name) {
    for (const auto& s : schemas()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

long long ExperimentConfig::get_int(const std::string& key) const { return parse_int(key, values.at(key)); }
double ExperimentConfig::get_real(const std::string& key) const { return parse_real(key, values.at(key)); }
bool ExperimentConfig::get_bool(const std::string& key) const { return parse_bool(key, values.at(key)); }
std::string ExperimentConfig::get_text(const std::string& key) const { return values.at(key); }

std::vector<long long> ExperimentConfig::get_ints(const std::string& key) const {
    std::vector<long long> out;
    for (const auto& v : parse_list(key, values.at(key))) out.push_back(parse_int(key, v));
    return out;
}

std::vector<double> ExperimentConfig::get_reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& v : parse_list(key, values.at(key))) out.push_back(parse_real(key, v));
    return out;
}

std::vector<std::string> ExperimentConfig::get_texts(const std::string& key) const {
    return parse_list(key, values.at(key));
}

ExperimentConfig default_config(const std::string& experiment, std::uint64_t seed) {
    const auto& schema = schema_for(experiment);
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.seed = seed;
    for (const auto& p : schema.params) cfg.values[p.key] = p.default_value;
    return cfg;
}

ExperimentConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    const auto header = tree.get_child_optional("experiment");
    if (!header) throw ConfigError("config: missing [experiment] section");
    const auto name = header->get_optional<std::string>("name");
    if (!name) throw ConfigError("config key 'experiment.name': missing");
    const auto& schema = schema_for(trim(*name));

    ExperimentConfig cfg = default_config(schema.name);
    for (const auto& [key, node] : *header) {
        const std::string value = trim(node.data());
        if (key == "name") continue;
        if (key == "schema_version") {
            cfg.schema_version = static_cast<int>(parse_int("experiment.schema_version", value));
            if (cfg.schema_version != kSchemaVersion) {
                throw ConfigError("config key 'experiment.schema_version': unsupported version " + value);
            }
        } else if (key == "seed") {
            const long long s = parse_int("experiment.seed", value);
            require(s >= 0, "experiment.seed", "must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (key == "output") {
            cfg.output = value;
        } else {
            throw ConfigError("config key 'experiment." + key + "': unknown key");
        }
    }

    for (const auto& [section, node] : tree) {
        if (section == "experiment") continue;
        if (section != schema.name) throw ConfigError("config section '" + section + "': unknown section");
        if (!node.data().empty() && node.empty()) throw ConfigError("config key '" + section + "': keys must be inside a section");
        for (const auto& [key, leaf] : node) {
            const auto it = std::find_if(schema.params.begin(), schema.params.end(),
                                         [&](const ParamSpec& p) { return p.key == key; });
            if (it == schema.params.end()) throw ConfigError("config key '" + section + "." + key + "': unknown key");
            const std::string value = trim(leaf.data());
            type_check(*it, value);
            cfg.values[key] = value;
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in);
}

// ------------------------------------------------------------- experiments

RunResult run_ghse_moments(const ExperimentConfig& cfg) {
    const auto ns = cfg.get_ints("n");
    const auto ms = cfg.get_ints("m");
    const auto ts = cfg.get_ints("t");
    for (auto n : ns) require(n >= 1, "n", "must be >= 1");
    for (auto m : ms) require(m >= 0, "m", "must be >= 0");
    for (auto t : ts) require(t >= 1 && t <= ensembles::kMaxMomentCopies, "t", "must lie in [1, 6]");
    for (auto n : ns) {
        for (auto t : ts) {
            require(n * t <= qcore::max_total_qubits(), "t", "n*t exceeds the dense qubit limit");
        }
    }

    RunResult r = start(cfg);
    RowSink sink(r, {"n", "m", "t"});
    const auto t0 = Clock::now();
    for (auto n : ns) {
        for (auto m : ms) {
            for (auto t : ts) {
                const auto tp = Clock::now();
                const ensembles::GhseParams params(static_cast<int>(n), static_cast<int>(m));
                const double td = ensembles::td_ghse_to_mixed(params, static_cast<int>(t));
                const double env = ensembles::td_envelope(params, static_cast<int>(t));
                const double wall = seconds_since(tp);
                const std::map<std::string, std::string> p{{"n", fmt_int(n)}, {"m", fmt_int(m)}, {"t", fmt_int(t)}};
                sink.add(p, "exact_td", td, std::nullopt, wall);
                sink.add(p, "envelope", env, std::nullopt, wall);
            }
        }
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_resources(const ExperimentConfig& cfg) {
    const auto samples = cfg.get_int("samples");
    const auto magic_samples = cfg.get_int("magic_samples");
    require(samples >= 1, "samples", "must be >= 1");
    require(magic_samples >= 1, "magic_samples", "must be >= 1");
    std::vector<std::vector<int>> coherence, hashing, magic;
    for (const auto& s : cfg.get_texts("coherence")) coherence.push_back(parse_point("coherence", s, 2));
    for (const auto& s : cfg.get_texts("hashing")) hashing.push_back(parse_point("hashing", s, 3));
    for (const auto& s : cfg.get_texts("magic")) magic.push_back(parse_point("magic", s, 2));
    const auto samplers = cfg.get_texts("samplers");
    for (const auto& s : samplers) require(s == "ghse" || s == "prdm", "samplers", "unknown sampler '" + s + "'");
    for (const auto& c : coherence) {
        require(c[0] >= 1 && c[1] >= 0 && c[0] + c[1] <= qcore::max_total_qubits(), "coherence", "point out of range");
    }
    for (const auto& h : hashing) {
        require(h[0] >= 2 && h[1] >= 0 && h[2] >= 1 && h[2] < h[0] && h[0] + h[1] <= qcore::max_total_qubits(), "hashing",
                "point out of range");
    }
    for (const auto& g : magic) {
        require(g[0] >= 1 && g[1] >= 0 && g[0] + g[1] <= monotones::kMaxStabilizerQubits, "magic", "need n >= 1 and n+m <= 3");
    }

    RunResult r = start(cfg);
    RowSink sink(r, {"sampler", "n", "m", "n_a", "samples"});
    const auto t0 = Clock::now();
    const std::uint64_t seed = cfg.seed;

    // Purification of sample i: a Haar state for ghse, a keyed-hash binary-phase state for prdm.
    auto purification = [](const std::string& sampler, int total, RngSeed s) {
        if (sampler == "ghse") return ensembles::sample_haar_state(total, s);
        Rng rng(s);
        const auto key = pseudostates::Key::random(total, rng);
        return pseudostates::binary_phase_state(key, pseudostates::PrfSpec::keyed_hash(total), total);
    };
    auto reduced = [](const std::string& sampler, int n, int m, RngSeed s) {
        if (sampler == "ghse") return ensembles::sample_ghse(ensembles::GhseParams(n, m), s);
        Rng rng(s);
        const auto key = pseudostates::Key::random(n + m, rng);
        return pseudostates::make_prdm(key, pseudostates::PrfSpec::keyed_hash(n + m), n, m);
    };
    const auto count = static_cast<std::size_t>(samples);

    for (const auto& sampler : samplers) {
        for (const auto& c : coherence) {
            const int n = c[0], m = c[1];
            const auto tp = Clock::now();
            const std::uint64_t s = derive_seed(seed, "resources/coherence/" + sampler + "/" + std::to_string(n) + "/" + std::to_string(m));
            std::vector<double> vals(count);
            parallel_for(count, [&](std::size_t i) { vals[i] = monotones::relative_entropy_coherence(reduced(sampler, n, m, {s, i})); });
            const auto [mean, se] = mean_and_se(vals);
            const double wall = seconds_since(tp);
            const std::map<std::string, std::string> p{
                {"sampler", sampler}, {"n", fmt_int(n)}, {"m", fmt_int(m)}, {"samples", fmt_int(samples)}};
            sink.add(p, "mean_coherence", mean, se, wall);
            sink.add(p, "min_coherence", *std::min_element(vals.begin(), vals.end()), std::nullopt, wall);
            sink.add(p, "coherence_lower_line", n - m - 1.0, std::nullopt, wall);
        }
        for (const auto& h : hashing) {
            const int n = h[0], m = h[1], na = h[2];
            const auto tp = Clock::now();
            const std::uint64_t s = derive_seed(seed, "resources/hashing/" + sampler + "/" + std::to_string(n) + "/" +
                                                          std::to_string(m) + "/" + std::to_string(na));
            std::vector<double> certified(count), raw(count);
            parallel_for(count, [&](std::size_t i) {
                const auto b = monotones::hashing_entanglement_bound(reduced(sampler, n, m, {s, i}), qcore::Bipartition(na, n - na));
                certified[i] = b.certified;
                raw[i] = b.raw;
            });
            const auto [mc, sc] = mean_and_se(certified);
            const auto [mr, sr] = mean_and_se(raw);
            const double wall = seconds_since(tp);
            const std::map<std::string, std::string> p{{"sampler", sampler}, {"n", fmt_int(n)}, {"m", fmt_int(m)},
                                                       {"n_a", fmt_int(na)}, {"samples", fmt_int(samples)}};
            sink.add(p, "mean_hashing_bound", mc, sc, wall);
            sink.add(p, "mean_hashing_raw", mr, sr, wall);
            sink.add(p, "hashing_lower_line", na - m - 1.0, std::nullopt, wall);
        }
        for (const auto& g : magic) {
            const int n = g[0], m = g[1];
            const auto tp = Clock::now();
            const auto stab_full = monotones::enumerate_stabilizer_states(n + m);
            const auto stab = monotones::enumerate_stabilizer_states(n);
            const std::uint64_t s = derive_seed(seed, "resources/magic/" + sampler + "/" + std::to_string(n) + "/" + std::to_string(m));
            const auto mc = static_cast<std::size_t>(magic_samples);
            std::vector<double> lr(mc), bound(mc);
            parallel_for(mc, [&](std::size_t i) {
                const auto psi = purification(sampler, n + m, {s, i});
                const auto rho = qcore::partial_trace(psi, n);
                lr[i] = monotones::robustness_of_magic(rho, stab).log_robustness();
                bound[i] = monotones::lr_lower_bound_from_purification(psi, m, stab_full);
            });
            std::size_t violations = 0;
            for (std::size_t i = 0; i < mc; ++i) violations += lr[i] < bound[i] - 1e-6 ? 1 : 0;
            const auto [ml, sl] = mean_and_se(lr);
            const auto [mb, sb] = mean_and_se(bound);
            const double wall = seconds_since(tp);
            const std::map<std::string, std::string> p{
                {"sampler", sampler}, {"n", fmt_int(n)}, {"m", fmt_int(m)}, {"samples", fmt_int(magic_samples)}};
            sink.add(p, "mean_log_robustness", ml, sl, wall);
            sink.add(p, "mean_lr_lower_bound", mb, sb, wall);
            sink.add(p, "lr_bound_violations", static_cast<double>(violations), std::nullopt, wall);
        }
    }

    if (cfg.get_bool("control")) {
        const auto tp = Clock::now();
        const int n = 2;
        const auto mixed = qcore::DensityMatrix::maximally_mixed(n);
        const double c = monotones::relative_entropy_coherence(mixed);
        const double lr = monotones::robustness_of_magic(mixed, monotones::enumerate_stabilizer_states(n)).log_robustness();
        const auto hb = monotones::hashing_entanglement_bound(mixed, qcore::Bipartition(1, 1));
        const double wall = seconds_since(tp);
        const std::map<std::string, std::string> p{{"sampler", "maximally-mixed"}, {"n", fmt_int(n)}, {"n_a", "1"}, {"samples", "1"}};
        sink.add(p, "mean_coherence", c, std::nullopt, wall);
        sink.add(p, "mean_log_robustness", lr, std::nullopt, wall);
        sink.add(p, "mean_hashing_bound", hb.certified, std::nullopt, wall);
        sink.add(p, "mean_hashing_raw", hb.raw, std::nullopt, wall);
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_noise_robustness(const ExperimentConfig& cfg) {
    const auto n = static_cast<int>(cfg.get_int("n"));
    const auto ms = cfg.get_ints("m");
    const auto ps = cfg.get_reals("p");
    const auto noise = cfg.get_text("noise");
    const auto sampler = cfg.get_text("sampler");
    const auto trials = cfg.get_int("trials");
    const auto exact_samples = cfg.get_int("exact_samples");
    require(n >= 1, "n", "must be >= 1");
    for (auto m : ms) require(m >= 0 && n + m <= qcore::max_total_qubits(), "m", "out of range");
    for (double p : ps) require(p >= 0.0 && p <= 1.0, "p", "must lie in [0, 1]");
    require(noise == "local" || noise == "global", "noise", "must be local or global");
    require(sampler == "prdm" || sampler == "ghse", "sampler", "must be prdm or ghse");
    require(trials >= 1, "trials", "must be >= 1");
    require(exact_samples >= 1, "exact_samples", "must be >= 1");

    RunResult r = start(cfg);
    RowSink sink(r, {"sampler", "noise", "n", "m", "p", "trials"});
    const auto t0 = Clock::now();
    for (auto m : ms) {
        for (double p : ps) {
            const auto tp = Clock::now();
            const auto clean = sampler == "prdm" ? distinguishers::prdm_sampler(n, static_cast<int>(m))
                                                 : distinguishers::ghse_sampler(n, static_cast<int>(m));
            channels::Channel ch = noise == "local" ? channels::Channel(channels::depolarizing_local_factored(n, p))
                                                    : channels::Channel(channels::depolarizing_global(n, p));
            const auto noisy = distinguishers::noisy_sampler(clean, ch);
            const std::uint64_t s = derive_seed(cfg.seed, "noise/" + std::to_string(m) + "/" + format_number(p));
            const auto rep = distinguishers::purity_attack(clean, noisy, static_cast<std::size_t>(trials), s);
            const double gap = distinguishers::expected_swap_gap(clean, noisy, static_cast<std::size_t>(exact_samples), s);
            const double wall = seconds_since(tp);
            const std::map<std::string, std::string> row{{"sampler", sampler}, {"noise", noise}, {"n", fmt_int(n)},
                                                         {"m", fmt_int(m)}, {"p", format_number(p)}, {"trials", fmt_int(trials)}};
            sink.add(row, "advantage", std::abs(rep.advantage), rep.std_error, wall);
            sink.add(row, "expected_gap", gap, std::nullopt, wall);
        }
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_efi(const ExperimentConfig& cfg) {
    const auto ns = cfg.get_ints("n");
    const auto ms = cfg.get_ints("m");
    const auto kappas = cfg.get_ints("kappa");
    const double c = cfg.get_real("c");
    const auto budget_n = cfg.get_int("budget_n");
    const auto budget_m = cfg.get_int("budget_m");
    const auto ps = cfg.get_reals("p");
    for (auto n : ns) require(n >= 1, "n", "must be >= 1");
    for (auto m : ms) require(m >= 0, "m", "must be >= 0");
    for (auto n : ns) {
        for (auto m : ms) require(n + m <= qcore::max_total_qubits(), "m", "n+m exceeds the dense qubit limit");
    }
    for (auto k : kappas) require(k >= 1 && k <= distinguishers::kMaxExhaustiveKeyBits, "kappa", "must lie in [1, 12]");
    require(c > 0.0 && c < 1.0, "c", "must lie in (0, 1)");
    require(budget_n >= 1 && budget_m >= 0, "budget_n", "need budget_n >= 1 and budget_m >= 0");
    for (double p : ps) require(p >= 0.0 && p <= 1.0, "p", "must lie in [0, 1]");

    RunResult r = start(cfg);
    RowSink sink(r, {"mode", "n", "m", "kappa", "c", "p"});
    const auto t0 = Clock::now();
    for (auto n : ns) {
        for (auto m : ms) {
            for (auto k : kappas) {
                const auto tp = Clock::now();
                const auto nu0 = distinguishers::prdm_key_average(static_cast<int>(n), static_cast<int>(m), static_cast<int>(k));
                const auto g = distinguishers::efi_gap(nu0, static_cast<int>(n));
                const double wall = seconds_since(tp);
                const std::map<std::string, std::string> p{
                    {"mode", "gap"}, {"n", fmt_int(n)}, {"m", fmt_int(m)}, {"kappa", fmt_int(k)}};
                sink.add(p, "s0", g.s0, std::nullopt, wall);
                sink.add(p, "entropy_budget", static_cast<double>(k + m), std::nullopt, wall);
                sink.add(p, "fannes_lower_bound", g.fannes_lower_bound, std::nullopt, wall);
                sink.add(p, "exact_td", g.exact_td, std::nullopt, wall);
                sink.add(p, "vacuous", g.vacuous() ? 1.0 : 0.0, std::nullopt, wall);
                sink.add(p, "gap_holds", g.exact_td >= g.fannes_lower_bound - 1e-8 ? 1.0 : 0.0, std::nullopt, wall);
            }
        }
    }
    const int bn = static_cast<int>(budget_n), bm = static_cast<int>(budget_m);
    for (double p : ps) {
        const auto tp = Clock::now();
        const auto nb = distinguishers::efi_noise_budget_from_entropy(bn, bm, c, channels::local_depolarizing_entropy(bn, p));
        const double wall = seconds_since(tp);
        const std::map<std::string, std::string> row{
            {"mode", "budget"}, {"n", fmt_int(bn)}, {"m", fmt_int(bm)}, {"c", format_number(c)}, {"p", format_number(p)}};
        sink.add(row, "h", nb.h, std::nullopt, wall);
        sink.add(row, "budget", nb.budget, std::nullopt, wall);
        sink.add(row, "robust", nb.robust ? 1.0 : 0.0, std::nullopt, wall);
    }
    {
        const auto tp = Clock::now();
        const double pc = distinguishers::critical_local_depolarizing_p(bn, bm, c);
        const std::map<std::string, std::string> row{{"mode", "critical"}, {"n", fmt_int(bn)}, {"m", fmt_int(bm)}, {"c", format_number(c)}};
        sink.add(row, "critical_p", pc, std::nullopt, seconds_since(tp));
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_money(const ExperimentConfig& cfg) {
    qmoney::MoneyConfig base;
    base.n_note = static_cast<int>(cfg.get_int("n_note"));
    base.serial_bits = static_cast<int>(cfg.get_int("serial_bits"));
    try {
        base.master_key = pseudostates::Key::from_hex(cfg.get_text("master_key"), 128);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config key 'master_key': ") + e.what());
    }
    try {
        base.prf = pseudostates::prf_kind_from_string(cfg.get_text("prf"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config key 'prf': ") + e.what());
    }
    const auto Ls = cfg.get_ints("L");
    const auto noise = cfg.get_text("noise");
    const double p = cfg.get_real("p");
    const auto trials = cfg.get_int("trials");
    const auto attack_trials = cfg.get_int("attack_trials");
    const auto victims = cfg.get_int("victims");
    require(noise == "global" || noise == "local", "noise", "must be global or local");
    require(p >= 0.0 && p <= 1.0, "p", "must lie in [0, 1]");
    require(trials >= 1, "trials", "must be >= 1");
    require(attack_trials >= 1, "attack_trials", "must be >= 1");

    auto sweep_cfg = [&](long long L) {
        auto c = base;
        c.L = static_cast<int>(L);
        c.f_min = cfg.get_real("f_min");
        c.eta = cfg.get_real("eta");
        return c;
    };
    auto attack_cfg = base;
    attack_cfg.L = static_cast<int>(cfg.get_int("attack_L"));
    attack_cfg.f_min = cfg.get_real("attack_f_min");
    attack_cfg.eta = cfg.get_real("attack_eta");
    try {
        for (auto L : Ls) sweep_cfg(L).validate();
        attack_cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("money config: ") + e.what());
    }
    require(victims >= attack_cfg.L, "victims", "must be >= attack_L");

    RunResult r = start(cfg);
    RowSink sink(r, {"scenario", "scheme", "family", "n_note", "L", "f_min", "eta", "p", "trials"});
    const auto t0 = Clock::now();
    const channels::Channel ch = noise == "global" ? channels::Channel(channels::depolarizing_global(base.n_note, p))
                                                   : channels::Channel(channels::depolarizing_local_factored(base.n_note, p));
    for (auto L : Ls) {
        const auto tp = Clock::now();
        const auto c = sweep_cfg(L);
        const auto res = qmoney::completeness_experiment(c, ch, static_cast<std::size_t>(trials), derive_seed(cfg.seed, "money/completeness/" + std::to_string(L)));
        const double wall = seconds_since(tp);
        const std::map<std::string, std::string> row{{"scenario", "completeness-" + noise}, {"scheme", "single-serial"},
                                                     {"family", "binary-phase"}, {"n_note", fmt_int(c.n_note)},
                                                     {"L", fmt_int(L)}, {"f_min", format_number(c.f_min)},
                                                     {"eta", format_number(c.eta)}, {"p", format_number(p)},
                                                     {"trials", fmt_int(trials)}};
        sink.add(row, "empirical_error", res.empirical_error, res.std_error, wall);
        sink.add(row, "exact_error", res.exact_error, std::nullopt, wall);
        sink.add(row, "chernoff_bound", res.chernoff_bound, std::nullopt, wall);
        sink.add(row, "min_fidelity", res.min_fidelity, std::nullopt, wall);
        sink.add(row, "threshold", c.threshold(), std::nullopt, wall);
        sink.add(row, "assumption_violated", res.assumption_violated ? 1.0 : 0.0, std::nullopt, wall);
        if (res.assumption_violated) {
            r.assumption_violated = true;
            r.messages.push_back("L=" + std::to_string(L) + ": per-note fidelity " + format_number(res.min_fidelity) +
                                 " is below F_min + eta = " + format_number(c.f_min + c.eta));
        }
    }

    auto attack_row = [&](const std::string& scenario, const std::string& scheme, const std::string& family) {
        return std::map<std::string, std::string>{{"scenario", scenario}, {"scheme", scheme}, {"family", family},
                                                  {"n_note", fmt_int(attack_cfg.n_note)}, {"L", fmt_int(attack_cfg.L)},
                                                  {"f_min", format_number(attack_cfg.f_min)},
                                                  {"eta", format_number(attack_cfg.eta)}, {"p", "0"},
                                                  {"trials", fmt_int(attack_trials)}};
    };
    for (auto scheme : {qmoney::Scheme::per_note_serial, qmoney::Scheme::single_serial}) {
        const auto tp = Clock::now();
        const auto res = qmoney::embezzle_attack(attack_cfg, scheme, static_cast<int>(victims), static_cast<std::size_t>(attack_trials),
                                                 derive_seed(cfg.seed, "money/embezzle/" + qmoney::to_string(scheme)));
        const double wall = seconds_since(tp);
        const auto row = attack_row("embezzle", qmoney::to_string(scheme), "binary-phase");
        const double nt = static_cast<double>(attack_trials);
        sink.add(row, "counterfeit_accept_rate", res.counterfeit_accept_rate,
                 std::sqrt(res.counterfeit_accept_rate * (1.0 - res.counterfeit_accept_rate) / nt), wall);
        sink.add(row, "counterfeit_accept_exact", res.counterfeit_accept_exact, std::nullopt, wall);
        sink.add(row, "victims_still_valid_rate", res.victims_still_valid_rate,
                 std::sqrt(res.victims_still_valid_rate * (1.0 - res.victims_still_valid_rate) / nt), wall);
        sink.add(row, "victims_still_valid_exact", res.victims_still_valid_exact, std::nullopt, wall);
    }
    for (auto family : {qmoney::NoteFamily::binary_phase, qmoney::NoteFamily::computational_zero}) {
        const auto tp = Clock::now();
        auto c = attack_cfg;
        c.family = family;
        const auto res = qmoney::clone_attack(c, static_cast<std::size_t>(attack_trials),
                                              derive_seed(cfg.seed, "money/clone/" + qmoney::to_string(family)));
        const double wall = seconds_since(tp);
        const auto row = attack_row("clone", "single-serial", qmoney::to_string(family));
        sink.add(row, "acceptance_rate", res.acceptance_rate, std::nullopt, wall);
        sink.add(row, "exact_acceptance", res.exact_acceptance, std::nullopt, wall);
        sink.add(row, "mean_note_fidelity", res.mean_note_fidelity, std::nullopt, wall);
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_memoryless(const ExperimentConfig& cfg) {
    const auto n = static_cast<int>(cfg.get_int("n"));
    const auto copies = cfg.get_ints("copies");
    const auto trials = cfg.get_int("trials");
    const auto cal = cfg.get_int("calibration_trials");
    const auto policies = cfg.get_texts("policies");
    const auto control_copies = cfg.get_int("control_copies");
    require(n >= 1 && n <= qcore::max_total_qubits(), "n", "out of range");
    for (auto c : copies) require(c >= 0, "copies", "must be >= 0");
    require(trials >= 1, "trials", "must be >= 1");
    require(cal >= 1, "calibration_trials", "must be >= 1");
    require(control_copies >= 0 && control_copies <= qcore::max_total_qubits(), "control_copies", "out of range");
    for (const auto& name : policies) {
        try {
            distinguishers::make_policy(name);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config key 'policies': ") + e.what());
        }
    }

    RunResult r = start(cfg);
    RowSink sink(r, {"hypotheses", "policy", "n", "copies", "trials"});
    const auto t0 = Clock::now();
    const distinguishers::EnsembleSampler haar{
        "haar", [n](RngSeed s) { return qcore::DensityMatrix::from_pure(ensembles::sample_haar_state(n, s)); }};
    const auto mixed = distinguishers::constant_sampler("mixed", qcore::DensityMatrix::maximally_mixed(n));

    auto emit = [&](const std::string& hyp, const std::string& policy, int nq, long long t,
                    const distinguishers::DistinguishReport& rep, std::optional<double> baseline, double wall) {
        const std::map<std::string, std::string> row{{"hypotheses", hyp}, {"policy", policy}, {"n", fmt_int(nq)},
                                                     {"copies", fmt_int(t)}, {"trials", fmt_int(trials)}};
        sink.add(row, "success", rep.success, rep.success_std_error, wall);
        sink.add(row, "rate_a", rep.rate_a, std::nullopt, wall);
        sink.add(row, "rate_b", rep.rate_b, std::nullopt, wall);
        if (baseline) sink.add(row, "memoryful_baseline", *baseline, std::nullopt, wall);
    };

    for (const auto& name : policies) {
        const auto policy = distinguishers::make_policy(name);
        for (auto t : copies) {
            const auto tp = Clock::now();
            distinguishers::MemorylessOptions opt;
            opt.copies = static_cast<std::size_t>(t);
            opt.trials = static_cast<std::size_t>(trials);
            opt.calibration_trials = static_cast<std::size_t>(cal);
            opt.seed = derive_seed(cfg.seed, "memoryless/" + name + "/" + std::to_string(t));
            const auto rep = distinguishers::memoryless_sim(haar, mixed, *policy, opt);
            std::optional<double> baseline;
            if (t == 0) {
                baseline = 0.5;
            } else if (t <= ensembles::kMaxMomentCopies && n * t <= 9) {
                baseline = distinguishers::memoryful_baseline(ensembles::haar_moment_exact(n, static_cast<int>(t)),
                                                              qcore::DensityMatrix::maximally_mixed(n * static_cast<int>(t)));
            }
            emit("haar-vs-mixed", name, n, t, rep, baseline, seconds_since(tp));
        }
    }
    if (cfg.get_bool("control")) {
        const auto tp = Clock::now();
        const auto zero = qcore::DensityMatrix::basis_projector(1, 0);
        distinguishers::MemorylessOptions opt;
        opt.copies = static_cast<std::size_t>(control_copies);
        opt.trials = static_cast<std::size_t>(trials);
        opt.calibration_trials = static_cast<std::size_t>(cal);
        opt.seed = derive_seed(cfg.seed, "memoryless/control");
        const auto rep = distinguishers::memoryless_sim(distinguishers::constant_sampler("zero", zero),
                                                        distinguishers::constant_sampler("mixed", qcore::DensityMatrix::maximally_mixed(1)),
                                                        *distinguishers::computational_policy(), opt);
        const int t = static_cast<int>(control_copies);
        const double baseline = t == 0 ? 0.5
                                       : distinguishers::memoryful_baseline(qcore::tensor_power(zero, t),
                                                                            qcore::DensityMatrix::maximally_mixed(t));
        emit("zero-vs-mixed", "computational", 1, control_copies, rep, baseline, seconds_since(tp));
    }
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_selftest(const ExperimentConfig& cfg) {
    RunResult r = start(cfg);
    RowSink sink(r, {"check"});
    const auto t0 = Clock::now();

    auto check = [&](const std::string& name, const std::function<std::pair<bool, double>()>& body) {
        const auto tp = Clock::now();
        bool ok = false;
        double measured = std::nan("");
        try {
            std::tie(ok, measured) = body();
        } catch (const std::exception& e) {
            r.messages.push_back(name + ": " + e.what());
        }
        const double wall = seconds_since(tp);
        sink.add({{"check", name}}, "pass", ok ? 1.0 : 0.0, std::nullopt, wall);
        sink.add({{"check", name}}, "measured", measured, std::nullopt, wall);
        if (!ok) r.messages.push_back("selftest check failed: " + name);
    };
    const std::uint64_t seed = cfg.seed;

    check("trace-distance-pure-vs-mixed", [] {
        const double td = qcore::trace_distance(qcore::DensityMatrix::basis_projector(1, 0), qcore::DensityMatrix::maximally_mixed(1));
        return std::pair{std::abs(td - 0.5) < 1e-12, td};
    });
    check("partial-trace-product", [seed] {
        Rng rng({derive_seed(seed, "selftest/pt"), 0});
        const auto a = ensembles::sample_ghse(ensembles::GhseParams(2, 1), rng);
        const auto b = ensembles::sample_ghse(ensembles::GhseParams(1, 1), rng);
        const double err = qcore::max_abs_diff(qcore::partial_trace(qcore::tensor(a, b), 2).matrix(), a.matrix());
        return std::pair{err < 1e-12, err};
    });
    check("ghse-first-moment-is-mixed", [] {
        const double td = ensembles::td_ghse_to_mixed(ensembles::GhseParams(2, 1), 1);
        return std::pair{td < 1e-12, td};
    });
    check("ghse-td-below-envelope", [] {
        double worst = -1.0;
        for (int n = 1; n <= 2; ++n) {
            for (int m = 0; m <= 3; ++m) {
                const ensembles::GhseParams p(n, m);
                worst = std::max(worst, ensembles::td_ghse_to_mixed(p, 2) - ensembles::td_envelope(p, 2));
            }
        }
        return std::pair{worst <= 0.0, worst};
    });
    check("prdm-uniform-diagonal", [seed] {
        Rng rng({derive_seed(seed, "selftest/prdm"), 0});
        const auto rho = pseudostates::make_prdm(pseudostates::Key::random(6, rng), pseudostates::PrfSpec::keyed_hash(6), 4, 2);
        double err = 0.0;
        for (std::size_t i = 0; i < rho.dim(); ++i) err = std::max(err, std::abs(rho(i, i).real() - 1.0 / 16.0));
        return std::pair{err == 0.0, err};
    });
    check("stabilizer-counts", [] {
        const auto s1 = monotones::enumerate_stabilizer_states(1).states.size();
        const auto s2 = monotones::enumerate_stabilizer_states(2).states.size();
        return std::pair{s1 == 6 && s2 == 60, static_cast<double>(s2)};
    });
    check("robustness-t-state", [] {
        qcore::ComplexVector v(2);
        v << 1.0, std::polar(1.0, std::numbers::pi / 4.0);
        const auto rho = qcore::DensityMatrix::from_pure(qcore::PureState::normalized(1, v));
        const auto sol = monotones::robustness_of_magic(rho, monotones::enumerate_stabilizer_states(1));
        return std::pair{std::abs(sol.objective - std::numbers::sqrt2) < 1e-8 && std::abs(sol.dual_value - sol.objective) < 1e-8,
                         sol.objective};
    });
    check("m2-additivity", [seed] {
        const auto a = ensembles::sample_haar_state(1, RngSeed{derive_seed(seed, "selftest/m2"), 0});
        const auto b = ensembles::sample_haar_state(2, RngSeed{derive_seed(seed, "selftest/m2"), 1});
        const double err = std::abs(monotones::stabilizer_renyi_2(a.tensor(b)) - monotones::stabilizer_renyi_2(a) -
                                    monotones::stabilizer_renyi_2(b));
        return std::pair{err < 1e-8, err};
    });
    check("mixed-unitary-channels-unital", [] {
        const bool ok = channels::is_unital(channels::depolarizing_local(2, 0.3)) &&
                        channels::is_unital(channels::dephasing_channel(2)) &&
                        channels::is_unital(channels::depolarizing_global(3, 0.4)) &&
                        !channels::is_unital(channels::amplitude_damping(0.3));
        return std::pair{ok, ok ? 1.0 : 0.0};
    });
    check("swap-test-projector-oracle", [seed] {
        const auto a = ensembles::sample_ghse(ensembles::GhseParams(1, 1), RngSeed{derive_seed(seed, "selftest/swap"), 0});
        const auto b = ensembles::sample_ghse(ensembles::GhseParams(1, 1), RngSeed{derive_seed(seed, "selftest/swap"), 1});
        const auto swap = ensembles::permutation_operator({1, 0}, 1);
        const qcore::ComplexMatrix proj = 0.5 * (qcore::ComplexMatrix::Identity(4, 4) + swap);
        const double oracle = (qcore::tensor(a, b).matrix() * proj).trace().real();
        const double err = std::abs(oracle - distinguishers::swap_test_prob(a, b));
        return std::pair{err < 1e-10, err};
    });
    check("money-threshold-arithmetic", [] {
        qmoney::MoneyConfig c;
        c.L = 200;
        c.f_min = 0.6;
        c.eta = 0.05;
        return std::pair{c.threshold() == 130, static_cast<double>(c.threshold())};
    });
    check("money-noiseless-accepted", [seed] {
        qmoney::MoneyConfig c;
        c.master_key = pseudostates::Key::from_hex("000102030405060708090a0b0c0d0e0f", 128);
        c.L = 16;
        Rng rng({derive_seed(seed, "selftest/money"), 0});
        const auto note = qmoney::mint(c, qmoney::random_serial(c, rng));
        const auto v = qmoney::verify(c, note, {derive_seed(seed, "selftest/money"), 1});
        return std::pair{v.accepted && v.successes == c.L, static_cast<double>(v.successes)};
    });
    check("vprdm-completeness", [seed] {
        Rng rng({derive_seed(seed, "selftest/vprdm"), 0});
        const auto key = pseudostates::Key::random(32, rng);
        const double v = pseudostates::vprdm_verify(pseudostates::vprdm_make(key, 4, 1, 6), key, 1, 6);
        return std::pair{std::abs(v - 1.0) < 1e-9, v};
    });
    check("efi-gap-holds", [] {
        const auto g = distinguishers::efi_gap(distinguishers::prdm_key_average(4, 1, 4), 4);
        return std::pair{g.exact_td >= g.fannes_lower_bound - 1e-8, g.exact_td - g.fannes_lower_bound};
    });
    check("purity-attack-identical-samplers", [seed] {
        const auto s = distinguishers::ghse_sampler(2, 1);
        const auto rep = distinguishers::purity_attack(s, s, 2000, derive_seed(seed, "selftest/purity"));
        return std::pair{std::abs(rep.advantage) <= 3.0 * rep.std_error + 1e-12, rep.advantage};
    });
    check("thread-count-invariance", [seed] {
        const auto s = distinguishers::prdm_sampler(3, 1);
        const auto noisy = distinguishers::noisy_sampler(s, channels::depolarizing_local_factored(3, 0.2));
        const int saved = worker_threads();
        set_worker_threads(1);
        const auto a = distinguishers::purity_attack(s, noisy, 500, derive_seed(seed, "selftest/threads"));
        set_worker_threads(3);
        const auto b = distinguishers::purity_attack(s, noisy, 500, derive_seed(seed, "selftest/threads"));
        set_worker_threads(saved);
        return std::pair{a.rate_a == b.rate_a && a.rate_b == b.rate_b, a.advantage - b.advantage};
    });
    r.wall_time_s = seconds_since(t0);
    return r;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    static const std::map<std::string, std::function<RunResult(const ExperimentConfig&)>> runners{
        {"ghse-moments", run_ghse_moments}, {"resources", run_resources}, {"noise-robustness", run_noise_robustness},
        {"efi", run_efi}, {"money", run_money}, {"memoryless", run_memoryless}, {"selftest", run_selftest}};
    const auto it = runners.find(cfg.experiment);
    if (it == runners.end()) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    return it->second(cfg);
}

// ------------------------------------------------------------------ output

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string to_csv(const RunResult& result, bool include_wall_time) {
    std::ostringstream out;
    out << "experiment,seed";
    for (const auto& c : result.param_columns) out << ',' << csv_cell(c);
    for (const auto& kv : result.fixed_params) out << ',' << csv_cell(kv.first);
    out << ",metric,value,std_error";
    if (include_wall_time) out << ",wall_time_s";
    out << '\n';
    for (const auto& row : result.rows) {
        out << csv_cell(result.experiment) << ',' << pseed(result.seed);
        for (const auto& p : row.params) out << ',' << csv_cell(p);
        for (const auto& kv : result.fixed_params) out << ',' << csv_cell(kv.second);
        out << ',' << csv_cell(row.metric) << ',' << format_number(row.value) << ','
            << (row.std_error ? format_number(*row.std_error) : "");
        if (include_wall_time) out << ',' << format_number(row.wall_time_s);
        out << '\n';
    }
    return out.str();
}

std::string to_json(const RunResult& result, const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["experiment"] = result.experiment;
    j["schema_version"] = cfg.schema_version;
    j["seed"] = result.seed;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.values) params[k] = v;
    j["parameters"] = params;
    j["assumption_violated"] = result.assumption_violated;
    j["messages"] = result.messages;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        nlohmann::ordered_json jr;
        nlohmann::ordered_json jp = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < result.param_columns.size(); ++i) {
            if (!row.params[i].empty()) jp[result.param_columns[i]] = row.params[i];
        }
        jr["params"] = jp;
        jr["metric"] = row.metric;
        jr["value"] = std::isfinite(row.value) ? nlohmann::ordered_json(row.value) : nlohmann::ordered_json(format_number(row.value));
        if (row.std_error) jr["std_error"] = *row.std_error;
        rows.push_back(std::move(jr));
    }
    j["rows"] = rows;
    j["wall_time_s"] = result.wall_time_s;
    return j.dump(2) + "\n";
}

void write_outputs(const RunResult& result, const ExperimentConfig& cfg, const std::filesystem::path& csv_path) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write " + csv_path.string());
        out << to_csv(result);
    }
    auto json_path = csv_path;
    json_path.replace_extension(".json");
    std::ofstream out(json_path);
    if (!out) throw std::runtime_error("cannot write " + json_path.string());
    out << to_json(result, cfg);
}

}  // namespace prdm::xcli
