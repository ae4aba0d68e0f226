// Acceptance suite: one binary, one pass/fail line per criterion.
// Exit status is the number of failed criteria.

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "softucb/experiment.hpp"
#include "softucb/gradient.hpp"
#include "softucb/policy.hpp"
#include "softucb/ridge.hpp"
#include "softucb/rng.hpp"
#include "softucb/runners.hpp"

using namespace softucb;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& label, const std::string& detail) {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

// Offline-training setup used by criteria 1 and 2. The constraint
// multiplier balances the score term around a width of 0.5-0.8 on these
// instances; the ascent uses Robbins-Monro steps so the convergence window
// can close, with the base step sized from a zero-width pilot trajectory so
// the first move lands mid-basin instead of overshooting.
constexpr double kTrainingEta = 3e-3;

RunConfig offline_config(const Environment& env, int horizon, std::uint64_t seed,
                         int trajectories) {
    RunConfig cfg;
    cfg.horizon = horizon;
    cfg.seed = seed;
    cfg.trajectories = trajectories;
    cfg.eta = kTrainingEta;
    cfg.schedule = StepSchedule::kRobbinsMonro;
    cfg.keep_trajectory_logs = false;

    RunConfig pilot = cfg;
    pilot.seed = substream_seed(seed, hash_label("pilot"));
    const double g0 = offline_gradient(run_softucb(env, pilot, 0.0).log, cfg.eta);
    cfg.learning_rate = 0.5 / std::max(1.0, g0);
    return cfg;
}

// ---------------------------------------------------------------- criterion 1
void criterion_beta_vs_bound() {
    struct Setting {
        int d;
        int horizon;
    };
    const std::vector<Setting> settings = {{5, 256}, {5, 512}, {5, 1024}, {10, 1024},
                                           {15, 1024}};
    const int seeds = 10;

    bool pass = true;
    std::ostringstream detail;
    for (const Setting& s : settings) {
        double ratio_sum = 0.0;
        int converged = 0;
        const double bound = theoretical_beta(0.5, 0.1, s.d, s.horizon, 1.0, 1.0);
        double beta_sum = 0.0;
        for (int seed = 1; seed <= seeds; ++seed) {
            const Environment env =
                make_synthetic(50, s.d, 0.5, substream_seed(9000 + seed, hash_label("c1")));
            const OfflineTraining training =
                train_offline(env, offline_config(env, s.horizon, 9000 + seed, 600));
            if (training.converged_at > 0) ++converged;
            beta_sum += training.beta_hat;
            ratio_sum += training.beta_hat / bound;
        }
        const double mean_beta = beta_sum / seeds;
        const double mean_ratio = ratio_sum / seeds;
        const bool ok = converged == seeds && mean_beta < bound && mean_ratio <= 0.6;
        if (!ok) pass = false;
        detail << "d=" << s.d << ",T=" << s.horizon << ": beta_hat=" << mean_beta
               << " bound=" << bound << " ratio=" << mean_ratio << " converged=" << converged
               << "/" << seeds << "; ";
    }
    report(1, pass, "learned width converges below the theoretical bound", detail.str());
}

// ---------------------------------------------------------------- criterion 2
void criterion_baseline_dominance() {
    bool pass = true;
    std::ostringstream detail;
    for (const int d : {10, 20}) {
        const int seeds = 20;
        const int horizon = 1024;
        double regret_soft = 0.0, regret_linucb = 0.0, regret_lints = 0.0, regret_eps = 0.0;
        for (int seed = 1; seed <= seeds; ++seed) {
            const Environment env =
                make_synthetic(50, d, 0.5, substream_seed(7000 + seed, hash_label("c2")));
            RunConfig cfg = offline_config(env, horizon, 7000 + seed, 300);
            const OfflineTraining training = train_offline(env, cfg);
            RunConfig eval = cfg;
            eval.seed = substream_seed(7000 + seed, hash_label("c2-eval"));
            regret_soft +=
                run_softucb(env, eval, training.beta_hat).expected_regret_curve.back();

            RunConfig base = cfg;
            base.seed = substream_seed(7000 + seed, hash_label("c2-linucb"));
            regret_linucb += run_linucb(env, base).expected_regret_curve.back();
            base.seed = substream_seed(7000 + seed, hash_label("c2-lints"));
            regret_lints += run_lints(env, base).expected_regret_curve.back();
            base.seed = substream_seed(7000 + seed, hash_label("c2-eps"));
            regret_eps +=
                run_epsilon_greedy(env, base, 0.05).expected_regret_curve.back();
        }
        regret_soft /= seeds;
        regret_linucb /= seeds;
        regret_lints /= seeds;
        regret_eps /= seeds;
        const bool ok = regret_soft < regret_linucb && regret_soft < regret_lints &&
                        regret_soft < regret_eps;
        if (!ok) pass = false;
        detail << "d=" << d << ": softucb=" << regret_soft << " linucb=" << regret_linucb
               << " lints=" << regret_lints << " eps=" << regret_eps << "; ";
    }
    report(2, pass, "trained policy beats every baseline at the final round", detail.str());
}

// ---------------------------------------------------------------- criterion 3
void criterion_regret_bound() {
    long satisfying = 0;
    long violations = 0;
    std::ostringstream detail;
    for (int seed = 1; seed <= 40; ++seed) {
        const Environment env =
            make_synthetic(30, 5, 0.5, substream_seed(5000 + seed, hash_label("c3")));
        RunConfig cfg;
        cfg.horizon = 256;
        cfg.seed = 5000 + seed;
        // widths around and above the theoretical value; runs whose
        // confidence constraint holds everywhere must respect the ceiling
        for (const double beta :
             {theoretical_beta(0.5, 0.1, 5, 256, 1.0, 1.0), 2.0, 1.0}) {
            const RunResult run = run_softucb(env, cfg, beta);
            if (run.diagnostics.constraint_violations != 0) continue;
            ++satisfying;
            const double ceiling = regret_bound(beta, cfg.delta, 5, cfg.horizon, cfg.alpha);
            if (run.expected_regret_curve.back() > ceiling) ++violations;
        }
    }
    detail << satisfying << " constraint-satisfying runs, " << violations
           << " above the ceiling";
    report(3, satisfying > 0 && violations == 0,
           "regret ceiling holds on every constraint-satisfying run", detail.str());
}

// ---------------------------------------------------------------- criterion 4
void criterion_suboptimality_oracle() {
    Rng rng(404040);
    long gap_violations = 0;
    long ordering_violations = 0;
    const int instances = 10000;

    for (int trial = 0; trial < instances; ++trial) {
        const int k = 2 + static_cast<int>(rng.uniform_index(5));
        const int d = 1 + static_cast<int>(rng.uniform_index(3));

        Eigen::MatrixXd arms(k, d);
        for (int i = 0; i < k; ++i) {
            double norm = 0.0;
            do {
                for (int j = 0; j < d; ++j) arms(i, j) = rng.uniform(-1.0, 1.0);
                norm = arms.row(i).norm();
            } while (norm < 1e-6);
            arms.row(i) /= norm;
        }
        RidgeState state(d, 1.0);
        const int updates = static_cast<int>(rng.uniform_index(15));
        for (int t = 0; t < updates; ++t)
            state.update(arms.row(static_cast<int>(rng.uniform_index(k))),
                         rng.uniform(-1.0, 1.0));

        const Eigen::VectorXd mu_hat = state.estimate_means(arms);
        const Eigen::VectorXd norms = state.weighted_norms(arms);
        const double beta = rng.uniform(0.05, 2.0);

        // plant true means inside the confidence band (constraint enforced)
        Eigen::VectorXd true_means(k);
        for (int i = 0; i < k; ++i)
            true_means[i] = mu_hat[i] + rng.uniform(-0.999, 0.999) * beta * norms[i];

        const IndexSnapshot snap = compute_indices(mu_hat, norms, beta);
        const double best = true_means.maxCoeff();
        for (int i : snap.lower_set)
            if (!(best - true_means[i] > 0.0)) ++gap_violations;
        for (int i : snap.upper_set) {
            for (int j : snap.upper_set) {
                if (snap.s_values[i] >= snap.s_values[j] &&
                    mu_hat[i] + beta * norms[i] < mu_hat[j] + beta * norms[j] - 1e-12)
                    ++ordering_violations;
            }
        }
    }
    std::ostringstream detail;
    detail << instances << " instances, " << gap_violations << " gap violations, "
           << ordering_violations << " ordering violations";
    report(4, gap_violations == 0 && ordering_violations == 0,
           "flagged arms are suboptimal and the index orders upper confidence bounds",
           detail.str());
}

// ---------------------------------------------------------------- criterion 5
void criterion_concentration() {
    Rng rng(505050);
    long checked = 0;
    long violations = 0;
    for (const double delta : {0.9, 0.99}) {
        int produced = 0;
        while (produced < 10000) {
            const int k = 3 + static_cast<int>(rng.uniform_index(6));
            Eigen::VectorXd mu_hat(k), norms(k);
            for (int i = 0; i < k; ++i) {
                mu_hat[i] = rng.uniform(-1.0, 1.0);
                norms[i] = rng.uniform(0.02, 1.0);
            }
            const double beta = rng.uniform(0.05, 1.5);
            const IndexSnapshot snap = compute_indices(mu_hat, norms, beta);
            if (snap.lower_set.empty() || snap.s_max_upper < 0.01) continue;
            ++produced;
            ++checked;
            const Policy policy = softmax_policy(snap, compute_gamma(snap, delta));
            double upper_mass = 0.0;
            for (int i : snap.upper_set) upper_mass += policy.probs[i];
            if (upper_mass < delta) ++violations;
        }
    }
    std::ostringstream detail;
    detail << checked << " snapshots, " << violations << " below the target mass";
    report(5, violations == 0, "calibrated coldness keeps candidate mass at delta",
           detail.str());
}

// ---------------------------------------------------------------- criterion 6
TrajectoryLog random_frozen_log(Rng& rng, double beta, int horizon, int arm_count) {
    TrajectoryLog log;
    log.horizon = horizon;
    for (int t = 0; t < horizon; ++t) {
        Eigen::VectorXd phi(arm_count), delta(arm_count), norms(arm_count), mu(arm_count);
        for (int i = 0; i < arm_count; ++i) {
            norms[i] = rng.uniform(0.05, 1.0);
            delta[i] = rng.uniform(0.0, 1.0);
            mu[i] = rng.uniform(-1.0, 1.0);
        }
        delta[static_cast<int>(rng.uniform_index(arm_count))] = 0.0;
        phi = norms.array() + rng.uniform(0.05, 1.0);
        RoundRecord r;
        r.gamma = rng.uniform(0.5, 5.0);
        r.phi = phi;
        r.norms = norms;
        r.mu_hat = mu;
        r.s_values = beta * phi - delta;
        r.probs = softmax_probs(r.s_values, r.gamma);
        log.records.push_back(std::move(r));
    }
    return log;
}

double frozen_objective(const TrajectoryLog& log, double beta_base, double beta_eval) {
    double total = 0.0;
    for (const RoundRecord& r : log.records) {
        Eigen::ArrayXd z = r.gamma * (r.s_values + (beta_eval - beta_base) * r.phi).array();
        z -= z.maxCoeff();
        const Eigen::ArrayXd w = z.exp();
        total += ((w / w.sum()) * r.mu_hat.array()).sum();
    }
    return total;
}

void criterion_gradient_correctness() {
    Rng rng(606060);
    long fd_failures = 0;
    long score_failures = 0;
    long online_failures = 0;
    double worst_rel = 0.0;

    for (int trial = 0; trial < 1000; ++trial) {
        const double beta = rng.uniform(0.0, 2.0);
        const int horizon = 1 + static_cast<int>(rng.uniform_index(6));
        const int k = 2 + static_cast<int>(rng.uniform_index(5));
        const TrajectoryLog log = random_frozen_log(rng, beta, horizon, k);

        const double analytic = offline_gradient(log, 0.0);
        const double h = 1e-5;
        const double numeric =
            (frozen_objective(log, beta, beta + h) - frozen_objective(log, beta, beta - h)) /
            (2.0 * h);
        const double rel = std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-6);
        worst_rel = std::max(worst_rel, rel);
        if (rel >= 1e-4) ++fd_failures;

        for (const RoundRecord& r : log.records) {
            double expectation = 0.0;
            for (int i = 0; i < k; ++i) expectation += r.probs[i] * grad_log_prob(r, i);
            if (std::abs(expectation) > 1e-12) ++score_failures;
        }

        double accumulator = 0.0;
        double last = 0.0;
        for (int t = 1; t <= horizon; ++t) {
            const OnlineGradient step =
                online_gradient(accumulator, log.records[t - 1], t, horizon, 0.0);
            accumulator = step.accumulator;
            last = step.gradient;
        }
        if (std::abs(last - analytic / horizon) > 1e-10) ++online_failures;
    }
    std::ostringstream detail;
    detail << "worst fd relative error " << worst_rel << "; " << fd_failures << "/"
           << score_failures << "/" << online_failures
           << " fd/score/online failures over 1000 logs";
    report(6, fd_failures == 0 && score_failures == 0 && online_failures == 0,
           "estimator matches finite differences and its structural identities",
           detail.str());
}

// ---------------------------------------------------------------- criterion 7
void criterion_numerical_integrity() {
    Rng rng(707070);
    const int d = 8;
    RidgeState state(d, 1.0);
    for (int t = 0; t < 10000; ++t) {
        Eigen::VectorXd x(d);
        double norm = 0.0;
        do {
            for (int j = 0; j < d; ++j) x[j] = rng.uniform(-1.0, 1.0);
            norm = x.norm();
        } while (norm < 1e-9);
        x /= norm;
        state.update(x, rng.normal());
    }
    const double identity_error =
        (state.gram() * state.gram_inv() - Eigen::MatrixXd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff();

    long potential_violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng stream = rng.fork(trial);
        const int dim = 2 + static_cast<int>(stream.uniform_index(6));
        const int horizon = 100 + static_cast<int>(stream.uniform_index(400));
        RidgeState traj(dim, 1.0);
        double potential = 0.0;
        for (int t = 0; t < horizon; ++t) {
            Eigen::VectorXd x(dim);
            double norm = 0.0;
            do {
                for (int j = 0; j < dim; ++j) x[j] = stream.uniform(-1.0, 1.0);
                norm = x.norm();
            } while (norm < 1e-9);
            x /= norm;
            const double weighted = traj.weighted_norm(x);
            potential += weighted * weighted;
            traj.update(x, stream.normal());
        }
        const double budget =
            2.0 * dim * std::log(1.0 + static_cast<double>(horizon) / dim);
        if (potential > budget) ++potential_violations;
    }
    std::ostringstream detail;
    detail << "identity error " << identity_error << " after 10000 updates; "
           << potential_violations << " potential violations over 100 trajectories";
    report(7, identity_error <= 1e-6 && potential_violations == 0,
           "incremental inverse stays tight and the potential sum stays bounded",
           detail.str());
}

// ---------------------------------------------------------------- criterion 8
void criterion_online_plateau() {
    const Environment env = make_synthetic(50, 10, 0.5, substream_seed(8080, hash_label("c8")));
    RunConfig cfg;
    cfg.horizon = 1024;
    cfg.seed = 8080;
    cfg.learning_rate = 200.0;  // per-round gradients carry a 1/T factor
    cfg.eta = kTrainingEta;
    cfg.schedule = StepSchedule::kRobbinsMonro;
    const RunResult result = train_online(env, cfg);

    const auto variance = [](const std::vector<double>& xs, std::size_t from) {
        double mean = 0.0;
        for (std::size_t i = from; i < xs.size(); ++i) mean += xs[i];
        const double n = static_cast<double>(xs.size() - from);
        mean /= n;
        double var = 0.0;
        for (std::size_t i = from; i < xs.size(); ++i)
            var += (xs[i] - mean) * (xs[i] - mean);
        return var / n;
    };
    const double tail_variance = variance(result.beta_trace, result.beta_trace.size() - 100);
    const double full_variance = variance(result.beta_trace, 0);

    bool uniform_while_unflagged = true;
    bool saw_uniform_phase = false;
    for (const RoundRecord& r : result.log.records) {
        if (r.gamma != 0.0) continue;
        saw_uniform_phase = true;
        if (std::abs(r.probs.maxCoeff() - r.probs.minCoeff()) > 1e-12)
            uniform_while_unflagged = false;
    }

    std::ostringstream detail;
    detail << "tail variance " << tail_variance << " vs trace variance " << full_variance
           << "; uniform phase observed " << (saw_uniform_phase ? "yes" : "no");
    report(8,
           full_variance > 0.0 && tail_variance < 0.1 * full_variance && saw_uniform_phase &&
               uniform_while_unflagged,
           "online width settles and the cold phase selects uniformly", detail.str());
}

// ---------------------------------------------------------------- criterion 9
void criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "softucb_acceptance";
    fs::remove_all(base);

    ExperimentSpec spec;
    spec.mode = Mode::kCompare;
    spec.algorithms = {AlgorithmId::kSoftUcb, AlgorithmId::kLinUcb, AlgorithmId::kEpsGreedy};
    spec.environment.arms = 12;
    spec.environment.dimension = 4;
    spec.run.horizon = 64;
    spec.run.beta = 0.8;
    spec.seeds = {1, 2, 3, 4, 5, 6};

    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    spec.out_dir = (base / "jobs1").string();
    spec.jobs = 1;
    const int status_a = run_experiment(spec);
    spec.out_dir = (base / "jobs4").string();
    spec.jobs = 4;
    const int status_b = run_experiment(spec);
    spec.out_dir = (base / "jobs1_again").string();
    spec.jobs = 1;
    const int status_c = run_experiment(spec);

    bool identical = status_a == 0 && status_b == 0 && status_c == 0;
    for (const char* name : {"regret.csv", "summary.csv", "diagnostics.csv"}) {
        const std::string a = slurp(base / "jobs1" / name);
        if (a.empty() || a != slurp(base / "jobs4" / name) ||
            a != slurp(base / "jobs1_again" / name))
            identical = false;
    }
    fs::remove_all(base);
    report(9, identical, "experiment artifacts are byte-identical across reruns and pools",
           "");
}

}  // namespace

int main() {
    criterion_beta_vs_bound();
    criterion_baseline_dominance();
    criterion_regret_bound();
    criterion_suboptimality_oracle();
    criterion_concentration();
    criterion_gradient_correctness();
    criterion_numerical_integrity();
    criterion_online_plateau();
    criterion_determinism();

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria failed\n", g_failures);
    }
    return g_failures;
}
