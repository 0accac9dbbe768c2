// Experiment runner: INI configs with per-experiment schemas, deterministic
// seeding, and CSV/JSON result files.
//
// Config layout:
//
//   [experiment]
//   name = ghse-moments
//   schema_version = 1
//   seed = 20240101
//   output = results/ghse.csv      ; optional
//
//   [ghse-moments]
//   n = 1, 2, 3
//   m = 0, 1, 2, 3, 4, 5
//
// Lists are comma separated. Unknown sections or keys are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace prdm::xcli {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitAssumptionViolated = 3;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParamType { integer, real, text, boolean, int_list, real_list, text_list };

struct ParamSpec {
    std::string key;
    ParamType type;
    std::string default_value;
    std::string help;
};

struct ExperimentSchema {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
};

const std::vector<ExperimentSchema>& schemas();
/// Throws ConfigError for unknown names.
const ExperimentSchema& schema_for(const std::string& name);

class ExperimentConfig {
public:
    std::string experiment;
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 1;
    std::string output;
    /// Raw text of every schema parameter, defaults filled in, already type-checked.
    std::map<std::string, std::string> values;

    long long get_int(const std::string& key) const;
    double get_real(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::string get_text(const std::string& key) const;
    std::vector<long long> get_ints(const std::string& key) const;
    std::vector<double> get_reals(const std::string& key) const;
    std::vector<std::string> get_texts(const std::string& key) const;
};

/// Parses and validates; every failure is a ConfigError naming the key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// All parameters at their defaults.
ExperimentConfig default_config(const std::string& experiment, std::uint64_t seed = 1);

struct ResultRow {
    std::vector<std::string> params;  // aligned with RunResult::param_columns
    std::string metric;
    double value = 0.0;
    std::optional<double> std_error;
    double wall_time_s = 0.0;
};

struct RunResult {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<std::string> param_columns;
    /// Scalar config values that are not row parameters; repeated on every CSV row.
    std::vector<std::pair<std::string, std::string>> fixed_params;
    std::vector<ResultRow> rows;
    bool assumption_violated = false;
    std::vector<std::string> messages;
    double wall_time_s = 0.0;
};

RunResult run_ghse_moments(const ExperimentConfig& cfg);
RunResult run_resources(const ExperimentConfig& cfg);
RunResult run_noise_robustness(const ExperimentConfig& cfg);
RunResult run_efi(const ExperimentConfig& cfg);
RunResult run_money(const ExperimentConfig& cfg);
RunResult run_memoryless(const ExperimentConfig& cfg);
/// Fast invariant checks across all modules; one "pass" row per check.
RunResult run_selftest(const ExperimentConfig& cfg);

RunResult run_experiment(const ExperimentConfig& cfg);

/// Columns: experiment, seed, <param columns>, <fixed params>, metric, value, std_error[, wall_time_s].
std::string to_csv(const RunResult& result, bool include_wall_time = true);
std::string to_json(const RunResult& result, const ExperimentConfig& cfg);
/// Writes the CSV to `csv_path` and the JSON summary next to it (.json).
void write_outputs(const RunResult& result, const ExperimentConfig& cfg, const std::filesystem::path& csv_path);

/// Decimal text used for every number in the outputs.
std::string format_number(double v);

}  // namespace prdm::xcli
