#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "softucb/env.hpp"
#include "softucb/gradient.hpp"
#include "softucb/policy.hpp"
#include "softucb/ridge.hpp"
#include "softucb/rng.hpp"

namespace softucb {

struct RunConfig {
    int horizon = 1024;
    double delta = 0.99;  // softmax concentration target
    double alpha = 1.0;
    double beta = 0.0;  // fixed-width runs
    std::uint64_t seed = 1;
    int trajectories = 50;  // offline training budget N
    double learning_rate = 0.05;
    double eta = 0.01;
    StepSchedule schedule = StepSchedule::kConstant;
    double epsilon = 0.05;   // epsilon-greedy mixture weight
    double bound_r = 0.5;    // sub-gaussian scale for width-bound formulas
    double bound_delta = 0.1;
    double bound_c = 1.0;    // parameter-norm bound
    double lints_scale = -1.0;  // negative selects the derived default
    bool keep_trajectory_logs = true;  // offline training drops per-run logs when false

    bool operator==(const RunConfig&) const = default;

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("RunConfig: horizon must be >= 1");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("RunConfig: delta must be in (0,1)");
        if (!(alpha > 0.0)) throw std::invalid_argument("RunConfig: alpha must be > 0");
        if (!(beta >= 0.0)) throw std::invalid_argument("RunConfig: beta must be >= 0");
        if (trajectories < 1) throw std::invalid_argument("RunConfig: trajectories must be >= 1");
        if (!(learning_rate >= 0.0))
            throw std::invalid_argument("RunConfig: learning_rate must be >= 0");
        if (!(eta > 0.0)) throw std::invalid_argument("RunConfig: eta must be > 0");
        if (!(epsilon >= 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("RunConfig: epsilon must be in [0,1]");
        if (!(bound_r >= 0.0)) throw std::invalid_argument("RunConfig: bound_r must be >= 0");
        if (!(bound_delta > 0.0 && bound_delta < 1.0))
            throw std::invalid_argument("RunConfig: bound_delta must be in (0,1)");
        if (!(bound_c >= 0.0)) throw std::invalid_argument("RunConfig: bound_c must be >= 0");
    }
};

struct Diagnostics {
    long gamma_cap_events = 0;
    // (arm, round) pairs where |mu_hat - mu| exceeded beta*norm, checkable
    // because the environment's true means are known.
    long constraint_violations = 0;
    bool constraint_checked = false;
};

struct RunResult {
    std::vector<double> expected_regret_curve;   // cumulative
    std::vector<double> realized_reward_curve;   // cumulative
    std::vector<double> beta_trace;              // per-update widths (training runs)
    std::vector<double> gradient_trace;          // per-update gradient estimates
    TrajectoryLog log;
    Diagnostics diagnostics;
};

// Width bound R*sqrt(2*log(1/delta) + d*log(1 + T/d)) + sqrt(alpha)*C.
inline double theoretical_beta(double r, double delta, int d, long horizon, double alpha,
                               double c) {
    if (!(r >= 0.0)) throw std::invalid_argument("theoretical_beta: r must be >= 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("theoretical_beta: delta must be in (0,1)");
    if (d < 1) throw std::invalid_argument("theoretical_beta: d must be >= 1");
    if (horizon < 1) throw std::invalid_argument("theoretical_beta: horizon must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("theoretical_beta: alpha must be > 0");
    if (!(c >= 0.0)) throw std::invalid_argument("theoretical_beta: c must be >= 0");
    const double t_over_d = static_cast<double>(horizon) / d;
    return r * std::sqrt(2.0 * std::log(1.0 / delta) + d * std::log(1.0 + t_over_d)) +
           std::sqrt(alpha) * c;
}

// Cumulative-regret ceiling 4*sqrt(2)*beta*delta*sqrt(T*d*log(alpha + T/d)).
inline double regret_bound(double beta_hat, double delta, int d, long horizon, double alpha) {
    const double t_over_d = static_cast<double>(horizon) / d;
    return 4.0 * std::sqrt(2.0) * beta_hat * delta *
           std::sqrt(static_cast<double>(horizon) * d * std::log(alpha + t_over_d));
}

// Posterior-inflation scale R*sqrt(9*d*log(T/delta)) from the cited
// Thompson-sampling construction.
inline double lints_default_scale(double r, int d, long horizon, double delta) {
    return r * std::sqrt(9.0 * d * std::log(static_cast<double>(horizon) / delta));
}

// First update index n (1-based) at which the last `window` width steps all
// moved by less than `tol`; -1 if the trace never settles.
inline int first_converged_iteration(const std::vector<double>& beta_trace, int window = 10,
                                     double tol = 1e-3) {
    const int updates = static_cast<int>(beta_trace.size()) - 1;
    for (int n = window; n <= updates; ++n) {
        bool settled = true;
        for (int k = n - window + 1; k <= n; ++k) {
            if (std::abs(beta_trace[k] - beta_trace[k - 1]) >= tol) {
                settled = false;
                break;
            }
        }
        if (settled) return n;
    }
    return -1;
}

namespace detail {

inline void check_environment(const Environment& env) {
    if (env.arms.count() < 2)
        throw std::invalid_argument("run: environment needs at least 2 arms");
}

struct CurveRecorder {
    std::vector<double> expected_regret;
    std::vector<double> realized_reward;
    double regret_acc = 0.0;
    double reward_acc = 0.0;

    void round(const Environment& env, const Eigen::VectorXd& probs, double realized) {
        const double step = env.best_mean() - probs.dot(env.true_means);
        regret_acc += std::max(0.0, step);
        reward_acc += realized;
        expected_regret.push_back(regret_acc);
        realized_reward.push_back(reward_acc);
    }
};

inline void count_constraint_violations(const IndexSnapshot& snap,
                                        const Eigen::VectorXd& true_means, double beta,
                                        Diagnostics& diagnostics) {
    diagnostics.constraint_checked = true;
    for (int i = 0; i < snap.mu_hat.size(); ++i) {
        if (std::abs(snap.mu_hat[i] - true_means[i]) > beta * snap.norms[i] + 1e-12)
            ++diagnostics.constraint_violations;
    }
}

inline RoundRecord make_record(const IndexSnapshot& snap, const Eigen::VectorXd& probs,
                               double gamma, int chosen, double reward) {
    return RoundRecord{probs,      snap.s_values, snap.phi, snap.norms,
                       snap.mu_hat, gamma,        chosen,   reward};
}

}  // namespace detail

// One T-round trajectory of the softmax index policy at a fixed width.
// Round t selects with the coldness calibrated after round t-1's update;
// the coldness for the next round is recalibrated on the post-update
// indices, so calibration and the indices it meets are always consistent.
inline RunResult run_softucb(const Environment& env, const RunConfig& config, double beta) {
    detail::check_environment(env);
    config.validate();
    if (!(beta >= 0.0)) throw std::invalid_argument("run_softucb: beta must be >= 0");

    const Eigen::MatrixXd& arms = env.arms.features();
    RidgeState state(env.arms.dimension(), config.alpha);
    Rng rng(config.seed);

    RunResult result;
    result.log.horizon = config.horizon;
    result.log.records.reserve(config.horizon);
    detail::CurveRecorder curves;

    double gamma = 0.0;
    IndexSnapshot snap =
        compute_indices(state.estimate_means(arms), state.weighted_norms(arms), beta);

    for (int t = 1; t <= config.horizon; ++t) {
        const Policy policy = softmax_policy(snap, gamma);
        detail::count_constraint_violations(snap, env.true_means, beta, result.diagnostics);

        const int arm = sample_arm(policy, rng);
        const double reward = draw_reward(env, arm, rng);
        curves.round(env, policy.probs, reward);
        result.log.records.push_back(detail::make_record(snap, policy.probs, gamma, arm, reward));

        state.update(arms.row(arm), reward);
        snap = compute_indices(state.estimate_means(arms), state.weighted_norms(arms), beta);
        bool capped = false;
        gamma = compute_gamma(snap, config.delta, &capped);
        if (capped) ++result.diagnostics.gamma_cap_events;
    }

    result.expected_regret_curve = std::move(curves.expected_regret);
    result.realized_reward_curve = std::move(curves.realized_reward);
    return result;
}

struct OfflineTraining {
    double beta_hat = 0.0;
    std::vector<double> beta_trace;      // beta_0 .. beta_N
    std::vector<double> gradient_trace;  // g_1 .. g_N
    std::vector<RunResult> runs;
    int converged_at = -1;
};

// Repeated-trajectory training: the width starts at zero and moves once per
// trajectory along the full-trajectory gradient estimate. Trajectory n uses
// the substream (seed, n), so reruns are reproducible run by run.
inline OfflineTraining train_offline(const Environment& env, const RunConfig& config) {
    detail::check_environment(env);
    config.validate();

    BetaParam param{0.0, config.eta, config.learning_rate, config.schedule};
    OfflineTraining training;
    training.beta_trace.push_back(param.beta);
    training.runs.reserve(config.trajectories);

    for (int n = 1; n <= config.trajectories; ++n) {
        RunConfig trajectory = config;
        trajectory.seed = substream_seed(config.seed, static_cast<std::uint64_t>(n));
        RunResult run = run_softucb(env, trajectory, param.beta);

        const double gradient = offline_gradient(run.log, config.eta);
        param = update_beta(param, gradient, n);
        training.gradient_trace.push_back(gradient);
        training.beta_trace.push_back(param.beta);

        if (!config.keep_trajectory_logs) run.log.records.clear();
        training.runs.push_back(std::move(run));
    }

    training.beta_hat = param.beta;
    training.converged_at = first_converged_iteration(training.beta_trace);
    return training;
}

// Single-trajectory training: the width moves every round along the
// bootstrapped average-reward gradient.
inline RunResult train_online(const Environment& env, const RunConfig& config) {
    detail::check_environment(env);
    config.validate();

    const Eigen::MatrixXd& arms = env.arms.features();
    RidgeState state(env.arms.dimension(), config.alpha);
    Rng rng(config.seed);

    RunResult result;
    result.log.horizon = config.horizon;
    result.log.records.reserve(config.horizon);
    result.beta_trace.reserve(config.horizon);
    detail::CurveRecorder curves;

    BetaParam param{0.0, config.eta, config.learning_rate, config.schedule};
    double gamma = 0.0;
    double accumulator = 0.0;
    IndexSnapshot snap =
        compute_indices(state.estimate_means(arms), state.weighted_norms(arms), param.beta);

    for (int t = 1; t <= config.horizon; ++t) {
        const Policy policy = softmax_policy(snap, gamma);
        detail::count_constraint_violations(snap, env.true_means, param.beta,
                                            result.diagnostics);

        const int arm = sample_arm(policy, rng);
        const double reward = draw_reward(env, arm, rng);
        curves.round(env, policy.probs, reward);
        result.log.records.push_back(detail::make_record(snap, policy.probs, gamma, arm, reward));

        state.update(arms.row(arm), reward);

        const OnlineGradient estimate = online_gradient(
            accumulator, result.log.records.back(), t, config.horizon, config.eta);
        accumulator = estimate.accumulator;
        param = update_beta(param, estimate.gradient, t);
        result.beta_trace.push_back(param.beta);
        result.gradient_trace.push_back(estimate.gradient);

        snap = compute_indices(state.estimate_means(arms), state.weighted_norms(arms),
                               param.beta);
        bool capped = false;
        gamma = compute_gamma(snap, config.delta, &capped);
        if (capped) ++result.diagnostics.gamma_cap_events;
    }

    result.expected_regret_curve = std::move(curves.expected_regret);
    result.realized_reward_curve = std::move(curves.realized_reward);
    return result;
}

// Classic optimistic baseline: argmax of mu_hat + beta*norm with the width
// from the theoretical bound; ties go to the smallest index.
inline RunResult run_linucb(const Environment& env, const RunConfig& config) {
    detail::check_environment(env);
    config.validate();

    const Eigen::MatrixXd& arms = env.arms.features();
    const int k = env.arms.count();
    const double beta = theoretical_beta(config.bound_r, config.bound_delta,
                                         env.arms.dimension(), config.horizon, config.alpha,
                                         config.bound_c);

    RidgeState state(env.arms.dimension(), config.alpha);
    Rng rng(config.seed);
    RunResult result;
    result.log.horizon = config.horizon;
    detail::CurveRecorder curves;

    for (int t = 1; t <= config.horizon; ++t) {
        const Eigen::VectorXd mu_hat = state.estimate_means(arms);
        const Eigen::VectorXd norms = state.weighted_norms(arms);

        result.diagnostics.constraint_checked = true;
        for (int i = 0; i < k; ++i) {
            if (std::abs(mu_hat[i] - env.true_means[i]) > beta * norms[i] + 1e-12)
                ++result.diagnostics.constraint_violations;
        }

        int arm = 0;
        double best = mu_hat[0] + beta * norms[0];
        for (int i = 1; i < k; ++i) {
            const double ucb = mu_hat[i] + beta * norms[i];
            if (ucb > best) {
                best = ucb;
                arm = i;
            }
        }

        Eigen::VectorXd probs = Eigen::VectorXd::Zero(k);
        probs[arm] = 1.0;
        const double reward = draw_reward(env, arm, rng);
        curves.round(env, probs, reward);
        result.log.records.push_back(RoundRecord{probs, Eigen::VectorXd::Zero(k),
                                                 Eigen::VectorXd::Zero(k), norms, mu_hat, 0.0,
                                                 arm, reward});
        state.update(arms.row(arm), reward);
    }

    result.expected_regret_curve = std::move(curves.expected_regret);
    result.realized_reward_curve = std::move(curves.realized_reward);
    return result;
}

// Parameter draw theta_hat + v*L*z with L L^T = V^{-1}; covariance of the
// draw is v^2 * V^{-1}.
inline Eigen::VectorXd lints_sample_theta(const RidgeState& state, double scale, Rng& rng) {
    const Eigen::MatrixXd chol = state.gram_inv().llt().matrixL();
    Eigen::VectorXd z(state.dimension());
    for (int j = 0; j < z.size(); ++j) z[j] = rng.normal();
    return state.theta_hat() + scale * (chol * z);
}

// Posterior-sampling baseline: greedy on means under a sampled parameter.
inline RunResult run_lints(const Environment& env, const RunConfig& config) {
    detail::check_environment(env);
    config.validate();

    const Eigen::MatrixXd& arms = env.arms.features();
    const int k = env.arms.count();
    const int d = env.arms.dimension();
    const double scale = config.lints_scale >= 0.0
                             ? config.lints_scale
                             : lints_default_scale(config.bound_r, d, config.horizon,
                                                   config.bound_delta);

    RidgeState state(d, config.alpha);
    Rng rng(config.seed);
    RunResult result;
    result.log.horizon = config.horizon;
    detail::CurveRecorder curves;

    for (int t = 1; t <= config.horizon; ++t) {
        const Eigen::VectorXd sampled_means = arms * lints_sample_theta(state, scale, rng);

        int arm = 0;
        for (int i = 1; i < k; ++i)
            if (sampled_means[i] > sampled_means[arm]) arm = i;

        Eigen::VectorXd probs = Eigen::VectorXd::Zero(k);
        probs[arm] = 1.0;
        const double reward = draw_reward(env, arm, rng);
        curves.round(env, probs, reward);
        result.log.records.push_back(RoundRecord{probs, Eigen::VectorXd::Zero(k),
                                                 Eigen::VectorXd::Zero(k),
                                                 state.weighted_norms(arms),
                                                 state.estimate_means(arms), 0.0, arm, reward});
        state.update(arms.row(arm), reward);
    }

    result.expected_regret_curve = std::move(curves.expected_regret);
    result.realized_reward_curve = std::move(curves.realized_reward);
    return result;
}

// Uniform exploration with probability epsilon, greedy otherwise. The
// recorded policy is the exact mixture so expected regret is accounted the
// same way as for the stochastic policies.
inline RunResult run_epsilon_greedy(const Environment& env, const RunConfig& config,
                                    double epsilon) {
    detail::check_environment(env);
    config.validate();
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("run_epsilon_greedy: epsilon must be in [0,1]");

    const Eigen::MatrixXd& arms = env.arms.features();
    const int k = env.arms.count();
    RidgeState state(env.arms.dimension(), config.alpha);
    Rng rng(config.seed);
    RunResult result;
    result.log.horizon = config.horizon;
    detail::CurveRecorder curves;

    for (int t = 1; t <= config.horizon; ++t) {
        const Eigen::VectorXd mu_hat = state.estimate_means(arms);
        int greedy = 0;
        for (int i = 1; i < k; ++i)
            if (mu_hat[i] > mu_hat[greedy]) greedy = i;

        Eigen::VectorXd probs = Eigen::VectorXd::Constant(k, epsilon / k);
        probs[greedy] += 1.0 - epsilon;

        const double u = rng.uniform();
        const int arm = u < epsilon ? static_cast<int>(rng.uniform_index(k)) : greedy;

        const double reward = draw_reward(env, arm, rng);
        curves.round(env, probs, reward);
        result.log.records.push_back(RoundRecord{probs, Eigen::VectorXd::Zero(k),
                                                 Eigen::VectorXd::Zero(k),
                                                 state.weighted_norms(arms), mu_hat, 0.0, arm,
                                                 reward});
        state.update(arms.row(arm), reward);
    }

    result.expected_regret_curve = std::move(curves.expected_regret);
    result.realized_reward_curve = std::move(curves.realized_reward);
    return result;
}

}  // namespace softucb
