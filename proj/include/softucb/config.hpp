#pragma once

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softucb/csv.hpp"
#include "softucb/env.hpp"
#include "softucb/runners.hpp"

namespace softucb {

enum class Mode { kSimulate, kTrainOffline, kTrainOnline, kCompare, kIngest };
enum class EnvKind { kSynthetic, kDataset };
enum class AlgorithmId {
    kSoftUcb,
    kSoftUcbOffline,
    kSoftUcbOnline,
    kLinUcb,
    kLinTs,
    kEpsGreedy
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::kSimulate: return "simulate";
        case Mode::kTrainOffline: return "train-offline";
        case Mode::kTrainOnline: return "train-online";
        case Mode::kCompare: return "compare";
        case Mode::kIngest: return "ingest";
    }
    return "simulate";
}

inline std::string to_string(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::kSoftUcb: return "softucb";
        case AlgorithmId::kSoftUcbOffline: return "softucb-offline";
        case AlgorithmId::kSoftUcbOnline: return "softucb-online";
        case AlgorithmId::kLinUcb: return "linucb";
        case AlgorithmId::kLinTs: return "lints";
        case AlgorithmId::kEpsGreedy: return "eps-greedy";
    }
    return "softucb";
}

inline std::string to_string(EnvKind kind) {
    return kind == EnvKind::kSynthetic ? "synthetic" : "dataset";
}

inline std::string to_string(NoiseModel noise) {
    switch (noise) {
        case NoiseModel::kGaussian: return "gaussian";
        case NoiseModel::kBernoulli: return "bernoulli";
        case NoiseModel::kNone: return "none";
    }
    return "gaussian";
}

inline std::string to_string(StepSchedule schedule) {
    return schedule == StepSchedule::kConstant ? "constant" : "robbins-monro";
}

struct EnvironmentSpec {
    EnvKind kind = EnvKind::kSynthetic;
    int arms = 50;
    int dimension = 10;
    NoiseModel noise = NoiseModel::kGaussian;
    double noise_scale = 0.5;
    std::string features_path;  // dataset kind
    std::string means_path;     // dataset kind

    bool operator==(const EnvironmentSpec&) const = default;
};

struct IngestSpec {
    std::string ratings_path;
    long held_out_column = -1;  // -1 selects the last column
    int rank = 10;
    double regularization = 0.1;
    int iterations = 100;
    int arms = 50;
    int dimension = 10;

    bool operator==(const IngestSpec&) const = default;
};

struct ExperimentSpec {
    Mode mode = Mode::kSimulate;
    EnvironmentSpec environment;
    std::vector<AlgorithmId> algorithms;
    RunConfig run;
    IngestSpec ingest;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    int jobs = 1;
    // Diagnostic thresholds; negative means report-only.
    long max_gamma_cap_events = -1;
    long max_constraint_violations = -1;

    bool operator==(const ExperimentSpec&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

struct ConfigCursor {
    std::string origin;
    long line = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + message);
    }
};

inline long parse_integer(const ConfigCursor& at, const std::string& key,
                          const std::string& value) {
    char* end = nullptr;
    const long v = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        at.fail(key + " expects an integer, got '" + value + "'");
    return v;
}

inline double parse_real(const ConfigCursor& at, const std::string& key,
                         const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        at.fail(key + " expects a real number, got '" + value + "'");
    return v;
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    for (char c : value) {
        if (c == ',') {
            items.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    const std::string tail = trim(current);
    if (!tail.empty() || !items.empty()) items.push_back(tail);
    return items;
}

inline Mode parse_mode(const ConfigCursor& at, const std::string& value) {
    if (value == "simulate") return Mode::kSimulate;
    if (value == "train-offline") return Mode::kTrainOffline;
    if (value == "train-online") return Mode::kTrainOnline;
    if (value == "compare") return Mode::kCompare;
    if (value == "ingest") return Mode::kIngest;
    at.fail("mode must be one of simulate, train-offline, train-online, compare, ingest; got '" +
            value + "'");
}

inline AlgorithmId parse_algorithm(const ConfigCursor& at, const std::string& value) {
    if (value == "softucb") return AlgorithmId::kSoftUcb;
    if (value == "softucb-offline") return AlgorithmId::kSoftUcbOffline;
    if (value == "softucb-online") return AlgorithmId::kSoftUcbOnline;
    if (value == "linucb") return AlgorithmId::kLinUcb;
    if (value == "lints") return AlgorithmId::kLinTs;
    if (value == "eps-greedy") return AlgorithmId::kEpsGreedy;
    at.fail("algorithms entries must be one of softucb, softucb-offline, softucb-online, "
            "linucb, lints, eps-greedy; got '" +
            value + "'");
}

}  // namespace detail

inline void validate_spec(const ExperimentSpec& spec);

// Parses the key/value section format documented in the README. Unknown
// sections and keys are rejected with the offending name; value constraints
// are checked at the line where the value appears.
inline ExperimentSpec parse_config_text(const std::string& text, const std::string& origin) {
    using detail::ConfigCursor;
    ExperimentSpec spec;
    bool mode_given = false;
    bool seeds_given = false;

    ConfigCursor at{origin, 0};
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::map<std::string, long> seen;  // "section.key" -> line

    while (std::getline(in, raw)) {
        ++at.line;
        const auto comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated section header '" + line + "'");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "environment" && section != "run" &&
                section != "ingest")
                at.fail("unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) at.fail("expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) at.fail("missing key before '='");
        if (section.empty()) at.fail("key '" + key + "' appears before any [section]");

        const std::string qualified = section + "." + key;
        if (auto it = seen.find(qualified); it != seen.end())
            at.fail("duplicate key '" + key + "' in [" + section + "] (first set on line " +
                    std::to_string(it->second) + ")");
        seen[qualified] = at.line;

        if (section == "experiment") {
            if (key == "mode") {
                spec.mode = detail::parse_mode(at, value);
                mode_given = true;
            } else if (key == "seeds") {
                spec.seeds.clear();
                for (const std::string& item : detail::split_list(value)) {
                    const long s = detail::parse_integer(at, "seeds", item);
                    if (s < 0) at.fail("seeds must be nonnegative, got " + item);
                    spec.seeds.push_back(static_cast<std::uint64_t>(s));
                }
                if (spec.seeds.empty()) at.fail("seeds list must contain at least one seed");
                seeds_given = true;
            } else if (key == "out_dir") {
                spec.out_dir = value;
            } else if (key == "jobs") {
                const long jobs = detail::parse_integer(at, "jobs", value);
                if (jobs < 1) at.fail("jobs must be >= 1, got " + value);
                spec.jobs = static_cast<int>(jobs);
            } else if (key == "algorithms") {
                spec.algorithms.clear();
                for (const std::string& item : detail::split_list(value))
                    spec.algorithms.push_back(detail::parse_algorithm(at, item));
            } else if (key == "max_gamma_cap_events") {
                spec.max_gamma_cap_events = detail::parse_integer(at, key, value);
            } else if (key == "max_constraint_violations") {
                spec.max_constraint_violations = detail::parse_integer(at, key, value);
            } else {
                at.fail("unknown key '" + key + "' in [experiment]");
            }
        } else if (section == "environment") {
            if (key == "kind") {
                if (value == "synthetic") spec.environment.kind = EnvKind::kSynthetic;
                else if (value == "dataset") spec.environment.kind = EnvKind::kDataset;
                else at.fail("kind must be synthetic or dataset, got '" + value + "'");
            } else if (key == "arms") {
                const long arms = detail::parse_integer(at, "arms", value);
                if (arms < 2) at.fail("arms must be >= 2, got " + value);
                spec.environment.arms = static_cast<int>(arms);
            } else if (key == "dimension") {
                const long dim = detail::parse_integer(at, "dimension", value);
                if (dim < 1) at.fail("dimension must be >= 1, got " + value);
                spec.environment.dimension = static_cast<int>(dim);
            } else if (key == "noise") {
                if (value == "gaussian") spec.environment.noise = NoiseModel::kGaussian;
                else if (value == "bernoulli") spec.environment.noise = NoiseModel::kBernoulli;
                else if (value == "none") spec.environment.noise = NoiseModel::kNone;
                else at.fail("noise must be gaussian, bernoulli, or none; got '" + value + "'");
            } else if (key == "noise_scale") {
                const double scale = detail::parse_real(at, "noise_scale", value);
                if (scale < 0.0) at.fail("noise_scale must be >= 0, got " + value);
                spec.environment.noise_scale = scale;
            } else if (key == "features") {
                spec.environment.features_path = value;
            } else if (key == "means") {
                spec.environment.means_path = value;
            } else {
                at.fail("unknown key '" + key + "' in [environment]");
            }
        } else if (section == "run") {
            if (key == "horizon") {
                const long horizon = detail::parse_integer(at, "horizon", value);
                if (horizon < 1) at.fail("horizon must be >= 1, got " + value);
                spec.run.horizon = static_cast<int>(horizon);
            } else if (key == "delta") {
                const double delta = detail::parse_real(at, "delta", value);
                if (!(delta > 0.0 && delta < 1.0))
                    at.fail("delta must be in (0,1), got " + value);
                spec.run.delta = delta;
            } else if (key == "alpha") {
                const double alpha = detail::parse_real(at, "alpha", value);
                if (!(alpha > 0.0)) at.fail("alpha must be > 0, got " + value);
                spec.run.alpha = alpha;
            } else if (key == "beta") {
                const double beta = detail::parse_real(at, "beta", value);
                if (beta < 0.0) at.fail("beta must be >= 0, got " + value);
                spec.run.beta = beta;
            } else if (key == "learning_rate") {
                const double rate = detail::parse_real(at, "learning_rate", value);
                if (rate < 0.0) at.fail("learning_rate must be >= 0, got " + value);
                spec.run.learning_rate = rate;
            } else if (key == "eta") {
                const double eta = detail::parse_real(at, "eta", value);
                if (!(eta > 0.0)) at.fail("eta must be > 0, got " + value);
                spec.run.eta = eta;
            } else if (key == "schedule") {
                if (value == "constant") spec.run.schedule = StepSchedule::kConstant;
                else if (value == "robbins-monro") spec.run.schedule = StepSchedule::kRobbinsMonro;
                else at.fail("schedule must be constant or robbins-monro, got '" + value + "'");
            } else if (key == "trajectories") {
                const long n = detail::parse_integer(at, "trajectories", value);
                if (n < 1) at.fail("trajectories must be >= 1, got " + value);
                spec.run.trajectories = static_cast<int>(n);
            } else if (key == "epsilon") {
                const double eps = detail::parse_real(at, "epsilon", value);
                if (!(eps >= 0.0 && eps <= 1.0)) at.fail("epsilon must be in [0,1], got " + value);
                spec.run.epsilon = eps;
            } else if (key == "bound_r") {
                const double r = detail::parse_real(at, "bound_r", value);
                if (r < 0.0) at.fail("bound_r must be >= 0, got " + value);
                spec.run.bound_r = r;
            } else if (key == "bound_delta") {
                const double bd = detail::parse_real(at, "bound_delta", value);
                if (!(bd > 0.0 && bd < 1.0)) at.fail("bound_delta must be in (0,1), got " + value);
                spec.run.bound_delta = bd;
            } else if (key == "bound_c") {
                const double c = detail::parse_real(at, "bound_c", value);
                if (c < 0.0) at.fail("bound_c must be >= 0, got " + value);
                spec.run.bound_c = c;
            } else if (key == "lints_scale") {
                if (value == "auto") {
                    spec.run.lints_scale = -1.0;
                } else {
                    const double v = detail::parse_real(at, "lints_scale", value);
                    if (v < 0.0) at.fail("lints_scale must be 'auto' or >= 0, got " + value);
                    spec.run.lints_scale = v;
                }
            } else {
                at.fail("unknown key '" + key + "' in [run]");
            }
        } else {  // [ingest]
            if (key == "ratings") {
                spec.ingest.ratings_path = value;
            } else if (key == "held_out_column") {
                spec.ingest.held_out_column = detail::parse_integer(at, "held_out_column", value);
            } else if (key == "rank") {
                const long rank = detail::parse_integer(at, "rank", value);
                if (rank < 1) at.fail("rank must be >= 1, got " + value);
                spec.ingest.rank = static_cast<int>(rank);
            } else if (key == "regularization") {
                const double reg = detail::parse_real(at, "regularization", value);
                if (reg < 0.0) at.fail("regularization must be >= 0, got " + value);
                spec.ingest.regularization = reg;
            } else if (key == "iterations") {
                const long iters = detail::parse_integer(at, "iterations", value);
                if (iters < 0) at.fail("iterations must be >= 0, got " + value);
                spec.ingest.iterations = static_cast<int>(iters);
            } else if (key == "arms") {
                const long arms = detail::parse_integer(at, "arms", value);
                if (arms < 2) at.fail("arms must be >= 2, got " + value);
                spec.ingest.arms = static_cast<int>(arms);
            } else if (key == "dimension") {
                const long dim = detail::parse_integer(at, "dimension", value);
                if (dim < 1) at.fail("dimension must be >= 1, got " + value);
                spec.ingest.dimension = static_cast<int>(dim);
            } else {
                at.fail("unknown key '" + key + "' in [ingest]");
            }
        }
    }

    if (!mode_given)
        throw ConfigError(origin + ": missing required key 'mode' in [experiment]");
    if (!seeds_given) {
        // Default experiment width: 20 seeded repetitions.
        for (std::uint64_t s = 1; s <= 20; ++s) spec.seeds.push_back(s);
    }
    validate_spec(spec);
    return spec;
}

inline void validate_spec(const ExperimentSpec& spec) {
    spec.run.validate();
    if (spec.seeds.empty()) throw ConfigError("spec requires at least one seed");
    if (spec.jobs < 1) throw ConfigError("jobs must be >= 1");

    if (spec.mode == Mode::kIngest) {
        if (spec.ingest.ratings_path.empty())
            throw ConfigError("ingest mode requires 'ratings' in [ingest]");
        return;
    }
    if (spec.environment.kind == EnvKind::kDataset) {
        if (spec.environment.features_path.empty())
            throw ConfigError("dataset environment requires 'features' in [environment]");
        if (spec.environment.means_path.empty())
            throw ConfigError("dataset environment requires 'means' in [environment]");
    }
    if (spec.mode == Mode::kCompare && spec.algorithms.empty())
        throw ConfigError("compare mode requires a nonempty 'algorithms' list in [experiment]");
}

inline ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

// Canonical rendering: parse_config_text(serialize_config(spec)) == spec.
inline std::string serialize_config(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "mode = " << to_string(spec.mode) << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < spec.seeds.size(); ++i)
        out << (i ? ", " : "") << spec.seeds[i];
    out << "\n";
    if (!spec.out_dir.empty()) out << "out_dir = " << spec.out_dir << "\n";
    out << "jobs = " << spec.jobs << "\n";
    if (!spec.algorithms.empty()) {
        out << "algorithms = ";
        for (std::size_t i = 0; i < spec.algorithms.size(); ++i)
            out << (i ? ", " : "") << to_string(spec.algorithms[i]);
        out << "\n";
    }
    out << "max_gamma_cap_events = " << spec.max_gamma_cap_events << "\n";
    out << "max_constraint_violations = " << spec.max_constraint_violations << "\n";

    out << "\n[environment]\n";
    out << "kind = " << to_string(spec.environment.kind) << "\n";
    out << "arms = " << spec.environment.arms << "\n";
    out << "dimension = " << spec.environment.dimension << "\n";
    out << "noise = " << to_string(spec.environment.noise) << "\n";
    out << "noise_scale = " << format_double(spec.environment.noise_scale) << "\n";
    if (!spec.environment.features_path.empty())
        out << "features = " << spec.environment.features_path << "\n";
    if (!spec.environment.means_path.empty())
        out << "means = " << spec.environment.means_path << "\n";

    out << "\n[run]\n";
    out << "horizon = " << spec.run.horizon << "\n";
    out << "delta = " << format_double(spec.run.delta) << "\n";
    out << "alpha = " << format_double(spec.run.alpha) << "\n";
    out << "beta = " << format_double(spec.run.beta) << "\n";
    out << "learning_rate = " << format_double(spec.run.learning_rate) << "\n";
    out << "eta = " << format_double(spec.run.eta) << "\n";
    out << "schedule = " << to_string(spec.run.schedule) << "\n";
    out << "trajectories = " << spec.run.trajectories << "\n";
    out << "epsilon = " << format_double(spec.run.epsilon) << "\n";
    out << "bound_r = " << format_double(spec.run.bound_r) << "\n";
    out << "bound_delta = " << format_double(spec.run.bound_delta) << "\n";
    out << "bound_c = " << format_double(spec.run.bound_c) << "\n";
    out << "lints_scale = "
        << (spec.run.lints_scale < 0.0 ? std::string("auto")
                                       : format_double(spec.run.lints_scale))
        << "\n";

    out << "\n[ingest]\n";
    if (!spec.ingest.ratings_path.empty())
        out << "ratings = " << spec.ingest.ratings_path << "\n";
    out << "held_out_column = " << spec.ingest.held_out_column << "\n";
    out << "rank = " << spec.ingest.rank << "\n";
    out << "regularization = " << format_double(spec.ingest.regularization) << "\n";
    out << "iterations = " << spec.ingest.iterations << "\n";
    out << "arms = " << spec.ingest.arms << "\n";
    out << "dimension = " << spec.ingest.dimension << "\n";
    return out.str();
}

}  // namespace softucb
