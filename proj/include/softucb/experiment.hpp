#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "softucb/config.hpp"
#include "softucb/csv.hpp"
#include "softucb/rating.hpp"
#include "softucb/runners.hpp"
#include "softucb/svg.hpp"

namespace softucb {

// FNV-1a over a file's bytes; used for input provenance in manifests.
inline std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checksum: cannot open '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

// Records every artifact written so a failed run can be cleaned up rather
// than leaving partial outputs behind.
class OutputTracker {
public:
    explicit OutputTracker(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::string path(const std::string& name) {
        const std::string full = (dir_ / name).string();
        created_.push_back(full);
        return full;
    }

    void discard_all() {
        for (const std::string& p : created_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        created_.clear();
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> created_;
};

struct AlgorithmOutcome {
    AlgorithmId id;
    RunResult run;
    std::vector<double> beta_trace;      // training algorithms only
    std::vector<double> gradient_trace;  // aligned with beta_trace updates
    double beta_hat = 0.0;
    int converged_at = -1;
    bool trained = false;
};

struct SeedOutcome {
    std::uint64_t seed = 0;
    std::vector<AlgorithmOutcome> algorithms;
};

inline Environment build_environment(const ExperimentSpec& spec, std::uint64_t seed) {
    if (spec.environment.kind == EnvKind::kSynthetic) {
        Environment env =
            make_synthetic(spec.environment.arms, spec.environment.dimension,
                           spec.environment.noise_scale, substream_seed(seed, hash_label("env")));
        env.noise = spec.environment.noise;
        return env;
    }
    const CsvTable features_csv = read_csv(spec.environment.features_path);
    const CsvTable means_csv = read_csv(spec.environment.means_path);
    if (features_csv.rows.size() != means_csv.rows.size())
        throw std::runtime_error("dataset environment: features and means row counts differ");

    const long k = static_cast<long>(features_csv.rows.size());
    const long d = static_cast<long>(features_csv.header.size());
    Eigen::MatrixXd features(k, d);
    Eigen::VectorXd means(k);
    for (long i = 0; i < k; ++i) {
        for (long j = 0; j < d; ++j)
            features(i, j) = std::strtod(features_csv.rows[i][j].c_str(), nullptr);
        means[i] = std::strtod(means_csv.rows[i][0].c_str(), nullptr);
    }
    return make_dataset_environment(std::move(features), std::move(means),
                                    spec.environment.noise, spec.environment.noise_scale);
}

inline std::vector<AlgorithmId> algorithms_for(const ExperimentSpec& spec) {
    switch (spec.mode) {
        case Mode::kSimulate:
            return spec.algorithms.empty() ? std::vector<AlgorithmId>{AlgorithmId::kSoftUcb}
                                           : spec.algorithms;
        case Mode::kTrainOffline: return {AlgorithmId::kSoftUcbOffline};
        case Mode::kTrainOnline: return {AlgorithmId::kSoftUcbOnline};
        case Mode::kCompare: return spec.algorithms;
        case Mode::kIngest: return {};
    }
    return {};
}

inline AlgorithmOutcome run_algorithm(AlgorithmId id, const Environment& env,
                                      const ExperimentSpec& spec, std::uint64_t seed) {
    RunConfig cfg = spec.run;
    cfg.seed = substream_seed(seed, hash_label(to_string(id)));

    AlgorithmOutcome out;
    out.id = id;
    switch (id) {
        case AlgorithmId::kSoftUcb:
            out.run = run_softucb(env, cfg, cfg.beta);
            break;
        case AlgorithmId::kSoftUcbOffline: {
            cfg.keep_trajectory_logs = false;
            const OfflineTraining training = train_offline(env, cfg);
            out.trained = true;
            out.beta_hat = training.beta_hat;
            out.beta_trace = training.beta_trace;
            out.gradient_trace = training.gradient_trace;
            out.converged_at = training.converged_at;
            RunConfig eval = cfg;
            eval.seed = substream_seed(seed, hash_label("softucb-offline/eval"));
            out.run = run_softucb(env, eval, training.beta_hat);
            for (const RunResult& r : training.runs) {
                out.run.diagnostics.gamma_cap_events += r.diagnostics.gamma_cap_events;
                out.run.diagnostics.constraint_violations += r.diagnostics.constraint_violations;
            }
            break;
        }
        case AlgorithmId::kSoftUcbOnline:
            out.run = train_online(env, cfg);
            out.trained = true;
            out.beta_trace = out.run.beta_trace;
            out.gradient_trace = out.run.gradient_trace;
            out.beta_hat = out.beta_trace.empty() ? 0.0 : out.beta_trace.back();
            break;
        case AlgorithmId::kLinUcb:
            out.run = run_linucb(env, cfg);
            break;
        case AlgorithmId::kLinTs:
            out.run = run_lints(env, cfg);
            break;
        case AlgorithmId::kEpsGreedy:
            out.run = run_epsilon_greedy(env, cfg, cfg.epsilon);
            break;
    }
    out.run.log.records.clear();  // curves and traces are what the harness persists
    return out;
}

inline SeedOutcome run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
    SeedOutcome outcome;
    outcome.seed = seed;
    const Environment env = build_environment(spec, seed);
    for (AlgorithmId id : algorithms_for(spec))
        outcome.algorithms.push_back(run_algorithm(id, env, spec, seed));
    return outcome;
}

// Fans seeds out to a bounded pool; outcome order is fixed by seed index,
// so artifacts never depend on scheduling.
inline std::vector<SeedOutcome> run_all_seeds(const ExperimentSpec& spec) {
    std::vector<SeedOutcome> outcomes(spec.seeds.size());
    std::vector<std::exception_ptr> errors(spec.seeds.size());
    std::atomic<std::size_t> cursor{0};

    const int workers = std::max(1, std::min<int>(spec.jobs,
                                                  static_cast<int>(spec.seeds.size())));
    auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= spec.seeds.size()) return;
            try {
                outcomes[i] = run_seed(spec, spec.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    for (const std::exception_ptr& err : errors)
        if (err) std::rethrow_exception(err);
    return outcomes;
}

inline void write_regret_csv(const std::string& path, const ExperimentSpec& spec,
                             const std::vector<SeedOutcome>& outcomes) {
    CsvWriter writer(path, {"seed", "algorithm", "round", "expected_regret",
                            "realized_reward"});
    for (const SeedOutcome& seed_outcome : outcomes) {
        for (const AlgorithmOutcome& algo : seed_outcome.algorithms) {
            const auto& regret = algo.run.expected_regret_curve;
            const auto& reward = algo.run.realized_reward_curve;
            for (int t = 0; t < spec.run.horizon; ++t) {
                writer.row({std::to_string(seed_outcome.seed), to_string(algo.id),
                            std::to_string(t + 1), format_double(regret[t]),
                            format_double(reward[t])});
            }
        }
    }
}

struct SummaryRow {
    std::string algorithm;
    int round;
    double mean;
    double stderr_;
};

inline std::vector<SummaryRow> summarize(const ExperimentSpec& spec,
                                         const std::vector<SeedOutcome>& outcomes) {
    std::vector<SummaryRow> rows;
    const std::vector<AlgorithmId> algos = algorithms_for(spec);
    const int horizon = spec.run.horizon;
    const double n = static_cast<double>(outcomes.size());
    for (std::size_t a = 0; a < algos.size(); ++a) {
        for (int t = 0; t < horizon; ++t) {
            double mean = 0.0;
            for (const SeedOutcome& s : outcomes)
                mean += s.algorithms[a].run.expected_regret_curve[t];
            mean /= n;
            double var = 0.0;
            for (const SeedOutcome& s : outcomes) {
                const double d = s.algorithms[a].run.expected_regret_curve[t] - mean;
                var += d * d;
            }
            const double se = outcomes.size() > 1 ? std::sqrt(var / (n - 1.0)) / std::sqrt(n)
                                                  : 0.0;
            rows.push_back({to_string(algos[a]), t + 1, mean, se});
        }
    }
    return rows;
}

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    CsvWriter writer(path, {"algorithm", "round", "mean_regret", "stderr"});
    for (const SummaryRow& r : rows)
        writer.row({r.algorithm, std::to_string(r.round), format_double(r.mean),
                    format_double(r.stderr_)});
}

inline void write_diagnostics_csv(const std::string& path,
                                  const std::vector<SeedOutcome>& outcomes) {
    CsvWriter writer(path, {"seed", "algorithm", "gamma_cap_events",
                            "constraint_violations"});
    for (const SeedOutcome& s : outcomes) {
        for (const AlgorithmOutcome& a : s.algorithms) {
            writer.row({std::to_string(s.seed), to_string(a.id),
                        std::to_string(a.run.diagnostics.gamma_cap_events),
                        std::to_string(a.run.diagnostics.constraint_violations)});
        }
    }
}

inline void write_beta_trace_csv(const std::string& path, const AlgorithmOutcome& algo) {
    CsvWriter writer(path, {"iteration", "beta", "gradient"});
    // beta_trace carries beta_0 in front for offline training; emit one row
    // per update so the file has exactly N (or T) rows.
    const std::size_t updates = algo.gradient_trace.size();
    const std::size_t offset = algo.beta_trace.size() - updates;
    for (std::size_t n = 0; n < updates; ++n) {
        writer.row({std::to_string(n + 1), format_double(algo.beta_trace[n + offset]),
                    format_double(algo.gradient_trace[n])});
    }
}

inline void write_beta_comparison_csv(const std::string& path, const ExperimentSpec& spec,
                                      const std::vector<SeedOutcome>& outcomes) {
    CsvWriter writer(path, {"algorithm", "dimension", "horizon", "beta_hat_mean",
                            "beta_hat_stderr", "beta_theoretical", "ratio"});
    const std::vector<AlgorithmId> algos = algorithms_for(spec);
    const double theoretical =
        theoretical_beta(spec.run.bound_r, spec.run.bound_delta, spec.environment.dimension,
                         spec.run.horizon, spec.run.alpha, spec.run.bound_c);
    for (std::size_t a = 0; a < algos.size(); ++a) {
        if (algos[a] != AlgorithmId::kSoftUcbOffline && algos[a] != AlgorithmId::kSoftUcbOnline)
            continue;
        double mean = 0.0;
        for (const SeedOutcome& s : outcomes) mean += s.algorithms[a].beta_hat;
        mean /= static_cast<double>(outcomes.size());
        double var = 0.0;
        for (const SeedOutcome& s : outcomes) {
            const double d = s.algorithms[a].beta_hat - mean;
            var += d * d;
        }
        const double se =
            outcomes.size() > 1
                ? std::sqrt(var / (static_cast<double>(outcomes.size()) - 1.0)) /
                      std::sqrt(static_cast<double>(outcomes.size()))
                : 0.0;
        writer.row({to_string(algos[a]), std::to_string(spec.environment.dimension),
                    std::to_string(spec.run.horizon), format_double(mean), format_double(se),
                    format_double(theoretical), format_double(mean / theoretical)});
    }
}

inline void write_charts(OutputTracker& tracker, const ExperimentSpec& spec,
                         const std::vector<SeedOutcome>& outcomes,
                         const std::vector<SummaryRow>& summary) {
    const std::vector<AlgorithmId> algos = algorithms_for(spec);
    std::vector<ChartSeries> regret_series;
    for (std::size_t a = 0; a < algos.size(); ++a) {
        ChartSeries series;
        series.name = to_string(algos[a]);
        for (const SummaryRow& row : summary) {
            if (row.algorithm != series.name) continue;
            series.x.push_back(row.round);
            series.y.push_back(row.mean);
        }
        regret_series.push_back(std::move(series));
    }
    write_line_chart(tracker.path("regret_curves.svg"), "Mean cumulative expected regret",
                     "round", "regret", regret_series);

    std::vector<ChartSeries> beta_series;
    for (std::size_t a = 0; a < algos.size(); ++a) {
        if (algos[a] != AlgorithmId::kSoftUcbOffline && algos[a] != AlgorithmId::kSoftUcbOnline)
            continue;
        ChartSeries series;
        series.name = to_string(algos[a]);
        const std::size_t updates = outcomes.front().algorithms[a].gradient_trace.size();
        for (std::size_t n = 0; n < updates; ++n) {
            double mean = 0.0;
            for (const SeedOutcome& s : outcomes) {
                const auto& trace = s.algorithms[a].beta_trace;
                mean += trace[n + (trace.size() - updates)];
            }
            series.x.push_back(static_cast<double>(n + 1));
            series.y.push_back(mean / static_cast<double>(outcomes.size()));
        }
        beta_series.push_back(std::move(series));
    }
    if (!beta_series.empty())
        write_line_chart(tracker.path("beta_learning.svg"), "Learned confidence width",
                         "update", "beta", beta_series);
}

}  // namespace detail

// Dataset ingestion: imputes missing ratings if needed, reduces features,
// and writes the environment files plus a provenance manifest.
inline int ingest(const ExperimentSpec& spec, std::ostream& log = std::cerr) {
    detail::OutputTracker tracker(spec.out_dir.empty() ? "softucb-out" : spec.out_dir);
    try {
        const RatingMatrix ratings = read_rating_csv(spec.ingest.ratings_path);
        const std::string checksum = file_checksum(spec.ingest.ratings_path);
        const std::uint64_t seed = spec.seeds.front();

        Eigen::MatrixXd completed;
        std::string imputation = "none";
        if (ratings.fully_observed()) {
            completed = ratings.values;
        } else {
            const ImputeResult imputed =
                factorize_impute(ratings, spec.ingest.rank, spec.ingest.regularization,
                                 spec.ingest.iterations, substream_seed(seed, hash_label("als")));
            completed = imputed.completed;
            imputation = "als";
            write_matrix_csv(tracker.path("completed_matrix.csv"), completed, "item");
        }

        const long held_out = spec.ingest.held_out_column >= 0 ? spec.ingest.held_out_column
                                                               : completed.cols() - 1;
        const Environment env = build_dataset_env(
            completed, held_out, spec.ingest.arms, spec.ingest.dimension,
            substream_seed(seed, hash_label("dataset-env")), spec.environment.noise,
            spec.environment.noise_scale);

        write_matrix_csv(tracker.path("features.csv"), env.arms.features(), "f");
        {
            CsvWriter writer(tracker.path("means.csv"), {"mean"});
            for (int i = 0; i < env.true_means.size(); ++i)
                writer.row({format_double(env.true_means[i])});
        }

        nlohmann::json manifest;
        manifest["input"] = spec.ingest.ratings_path;
        manifest["input_checksum"] = checksum;
        manifest["imputation"] = imputation;
        manifest["parameters"] = {{"rank", spec.ingest.rank},
                                  {"regularization", spec.ingest.regularization},
                                  {"iterations", spec.ingest.iterations},
                                  {"arms", spec.ingest.arms},
                                  {"dimension", spec.ingest.dimension},
                                  {"held_out_column", held_out}};
        manifest["seed"] = seed;
        manifest["outputs"] = {"features.csv", "means.csv"};
        if (imputation == "als") manifest["outputs"].push_back("completed_matrix.csv");
        std::ofstream out(tracker.path("manifest.json"));
        out << manifest.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        log << "ingest failed: " << e.what() << "\n";
        tracker.discard_all();
        return 1;
    }
}

// Runs the configured experiment and writes all artifacts under the output
// directory. Returns 0 when every run completed and diagnostics stayed
// within configured thresholds (negative thresholds are report-only).
inline int run_experiment(const ExperimentSpec& spec, std::ostream& log = std::cerr) {
    if (spec.mode == Mode::kIngest) return ingest(spec, log);

    detail::OutputTracker tracker(spec.out_dir.empty() ? "softucb-out" : spec.out_dir);
    try {
        validate_spec(spec);
        const std::vector<detail::SeedOutcome> outcomes = detail::run_all_seeds(spec);

        {
            std::ofstream cfg(tracker.path("config.cfg"));
            cfg << serialize_config(spec);
        }
        detail::write_regret_csv(tracker.path("regret.csv"), spec, outcomes);
        const std::vector<detail::SummaryRow> summary = detail::summarize(spec, outcomes);
        detail::write_summary_csv(tracker.path("summary.csv"), summary);
        detail::write_diagnostics_csv(tracker.path("diagnostics.csv"), outcomes);

        bool any_training = false;
        for (const detail::SeedOutcome& s : outcomes) {
            for (const detail::AlgorithmOutcome& a : s.algorithms) {
                if (!a.trained) continue;
                any_training = true;
                detail::write_beta_trace_csv(
                    tracker.path("beta_trace_" + to_string(a.id) + "_seed" +
                                 std::to_string(s.seed) + ".csv"),
                    a);
            }
        }
        if (any_training)
            detail::write_beta_comparison_csv(tracker.path("beta_comparison.csv"), spec,
                                              outcomes);
        detail::write_charts(tracker, spec, outcomes, summary);

        long cap_events = 0;
        long violations = 0;
        for (const detail::SeedOutcome& s : outcomes) {
            for (const detail::AlgorithmOutcome& a : s.algorithms) {
                cap_events += a.run.diagnostics.gamma_cap_events;
                violations += a.run.diagnostics.constraint_violations;
            }
        }
        if (spec.max_gamma_cap_events >= 0 && cap_events > spec.max_gamma_cap_events) {
            log << "diagnostics: " << cap_events << " coldness-cap events exceed threshold "
                << spec.max_gamma_cap_events << "\n";
            return 2;
        }
        if (spec.max_constraint_violations >= 0 &&
            violations > spec.max_constraint_violations) {
            log << "diagnostics: " << violations << " confidence violations exceed threshold "
                << spec.max_constraint_violations << "\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        log << "experiment failed: " << e.what() << "\n";
        tracker.discard_all();
        return 1;
    }
}

}  // namespace softucb
