// Command-line entry point for batch bandit experiments. Subcommands map
// onto config modes; the config file is authoritative and flags override
// the handful of operational knobs (output dir, seeds, parallelism).

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softucb/config.hpp"
#include "softucb/experiment.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string seeds;
    int jobs = 0;
    bool verbose = false;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::string current;
    auto flush = [&]() {
        if (current.empty()) return;
        char* end = nullptr;
        const long v = std::strtol(current.c_str(), &end, 10);
        if (end == current.c_str() || *end != '\0' || v < 0)
            throw softucb::ConfigError("--seeds expects nonnegative integers, got '" + current +
                                       "'");
        seeds.push_back(static_cast<std::uint64_t>(v));
        current.clear();
    };
    for (char c : text) {
        if (c == ',') flush();
        else if (c != ' ') current += c;
    }
    flush();
    if (seeds.empty()) throw softucb::ConfigError("--seeds list is empty");
    return seeds;
}

int run_mode(softucb::Mode mode, const CliOptions& options) {
    using namespace softucb;
    try {
        ExperimentSpec spec = parse_config(options.config_path);
        if (spec.mode != mode)
            throw ConfigError("config mode '" + to_string(spec.mode) +
                              "' does not match subcommand '" + to_string(mode) + "'");
        if (!options.seeds.empty()) spec.seeds = parse_seed_list(options.seeds);
        if (options.jobs > 0) spec.jobs = options.jobs;
        if (!options.out_dir.empty()) {
            spec.out_dir = options.out_dir;
        } else if (spec.out_dir.empty()) {
            const char* env_dir = std::getenv("SOFTUCB_OUT_DIR");
            spec.out_dir = env_dir ? env_dir : "softucb-out";
        }
        validate_spec(spec);

        if (options.verbose) {
            std::cerr << "mode=" << to_string(spec.mode) << " seeds=" << spec.seeds.size()
                      << " jobs=" << spec.jobs << " out=" << spec.out_dir << "\n";
        }
        const int status = run_experiment(spec);
        if (options.verbose && status == 0)
            std::cerr << "artifacts written to " << spec.out_dir << "\n";
        return status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear bandit experiment harness with a learnable confidence width"};
    app.require_subcommand(1);

    CliOptions options;
    const std::vector<std::pair<std::string, softucb::Mode>> modes = {
        {"simulate", softucb::Mode::kSimulate},
        {"train-offline", softucb::Mode::kTrainOffline},
        {"train-online", softucb::Mode::kTrainOnline},
        {"compare", softucb::Mode::kCompare},
        {"ingest", softucb::Mode::kIngest},
    };

    for (const auto& [name, mode] : modes) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", options.config_path, "experiment config file")->required();
        sub->add_option("--out", options.out_dir, "output directory");
        sub->add_option("--seeds", options.seeds, "comma-separated seed list override");
        sub->add_option("--jobs", options.jobs, "worker threads across seeds");
        sub->add_flag("--verbose", options.verbose, "log progress to stderr");
        const softucb::Mode m = mode;
        sub->callback([&options, m]() { std::exit(run_mode(m, options)); });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
