// prdm-lab: run one experiment from an INI config (or defaults) and write CSV/JSON.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "prdm/parallel.hpp"
#include "prdm/xcli.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    long long seed = -1;
    int threads = 0;
    bool no_wall_time = false;
};

int run(const std::string& experiment, const Options& opt) {
    using namespace prdm::xcli;
    ExperimentConfig cfg;
    try {
        cfg = opt.config.empty() ? default_config(experiment) : load_config(opt.config);
        if (cfg.experiment != experiment) {
            throw ConfigError("config describes experiment '" + cfg.experiment + "', not '" + experiment + "'");
        }
        if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
        if (!opt.out.empty()) cfg.output = opt.out;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    if (opt.threads > 0) prdm::set_worker_threads(opt.threads);

    RunResult result;
    try {
        result = run_experiment(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (cfg.output.empty()) {
        std::cout << to_csv(result, !opt.no_wall_time);
    } else {
        write_outputs(result, cfg, cfg.output);
        std::cerr << "wrote " << cfg.output << " (" << result.rows.size() << " rows, "
                  << format_number(result.wall_time_s) << " s)\n";
    }
    for (const auto& m : result.messages) std::cerr << "note: " << m << '\n';

    if (experiment == "selftest" && !result.messages.empty()) return 1;
    if (result.assumption_violated) return kExitAssumptionViolated;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudorandom density matrix experiments"};
    app.require_subcommand(1);
    Options opt;
    std::string chosen;

    for (const auto& schema : prdm::xcli::schemas()) {
        auto* sub = app.add_subcommand(schema.name, schema.summary);
        sub->add_option("--config", opt.config, "INI config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "override the master seed")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", opt.out, "CSV output path (JSON summary written alongside)");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--no-wall-time", opt.no_wall_time, "omit the wall_time_s column on stdout");
        sub->callback([&chosen, name = schema.name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : prdm::xcli::kExitConfigError;
    }
    return run(chosen, opt);
}
