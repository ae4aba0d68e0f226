#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "softucb/policy.hpp"

namespace softucb {

// Everything the confidence-width gradient needs from one round.
// gamma is the coldness the recorded policy was sampled with.
struct RoundRecord {
    Eigen::VectorXd probs;
    Eigen::VectorXd s_values;
    Eigen::VectorXd phi;
    Eigen::VectorXd norms;
    Eigen::VectorXd mu_hat;
    double gamma = 0.0;
    int chosen = 0;
    double reward = 0.0;
};

struct TrajectoryLog {
    std::vector<RoundRecord> records;
    int horizon = 0;
};

enum class StepSchedule { kConstant, kRobbinsMonro };

// Learned confidence width plus its ascent hyperparameters. beta stays
// nonnegative through every update; eta is the multiplier on the
// confidence-constraint term and must stay positive.
struct BetaParam {
    double beta = 0.0;
    double eta = 0.01;
    double learning_rate = 0.05;
    StepSchedule schedule = StepSchedule::kConstant;
};

// d/d(beta) log p_i for the softmax policy, in the numerically stable form
// gamma*phi_i - sum_j gamma*phi_j*p_j.
inline double grad_log_prob(const RoundRecord& record, int arm) {
    const double weighted = record.gamma * record.phi.dot(record.probs);
    return record.gamma * record.phi[arm] - weighted;
}

namespace detail {

// Per-round score contribution sum_i p_i * value_i * dlogp_i, O(K).
inline double score_term(const RoundRecord& record, const Eigen::VectorXd& values) {
    const double weighted = record.gamma * record.phi.dot(record.probs);
    double total = 0.0;
    for (int i = 0; i < record.probs.size(); ++i) {
        total += record.probs[i] * values[i] * (record.gamma * record.phi[i] - weighted);
    }
    return total;
}

}  // namespace detail

// Full-trajectory estimator: score term with estimated means plus the
// constraint multiplier applied to every arm norm of every round. The
// recorded gamma of each round is treated as a constant of that round.
inline double offline_gradient(const TrajectoryLog& log, double eta) {
    if (log.records.empty()) throw std::invalid_argument("offline_gradient: empty log");
    double total = 0.0;
    for (const RoundRecord& record : log.records) {
        total += detail::score_term(record, record.mu_hat) + eta * record.norms.sum();
    }
    return total;
}

// Same estimator with the true means substituted; usable as an oracle on
// synthetic instances where the means are known.
inline double offline_gradient_true_means(const TrajectoryLog& log,
                                          const Eigen::VectorXd& true_means, double eta) {
    if (log.records.empty())
        throw std::invalid_argument("offline_gradient_true_means: empty log");
    double total = 0.0;
    for (const RoundRecord& record : log.records) {
        total += detail::score_term(record, true_means) + eta * record.norms.sum();
    }
    return total;
}

// Value of the realized policy sequence under estimated means,
// sum_t sum_i p_{i,t} * mu_hat_{i,t}.
inline double policy_value_estimate(const TrajectoryLog& log) {
    double total = 0.0;
    for (const RoundRecord& record : log.records) total += record.probs.dot(record.mu_hat);
    return total;
}

struct OnlineGradient {
    double gradient = 0.0;
    double accumulator = 0.0;
};

// Streaming estimator for round t of a T-round trajectory. The accumulator
// carries the past score contributions, each computed once with the width
// in force at its own round; the current round is bootstrapped over the
// remaining T - t rounds.
inline OnlineGradient online_gradient(double accumulator, const RoundRecord& record, int t,
                                      int horizon, double eta) {
    if (t < 1 || t > horizon) throw std::invalid_argument("online_gradient: t out of range");
    const double contribution = detail::score_term(record, record.mu_hat);
    OnlineGradient out;
    out.accumulator = accumulator + contribution;
    out.gradient = (out.accumulator + (horizon - t) * contribution + eta * record.norms.sum()) /
                   static_cast<double>(horizon);
    return out;
}

// Exact-recompute variant: every past round's probabilities and score are
// re-evaluated at beta_now by shifting the recorded indices,
// s'(beta_now) = s + (beta_now - beta_recorded)*phi. O(Kt) per call; kept
// for validating the streaming estimator.
inline double online_gradient_exact(const TrajectoryLog& log,
                                    const std::vector<double>& round_betas, int t, int horizon,
                                    double beta_now, double eta) {
    if (t < 1 || t > static_cast<int>(log.records.size()))
        throw std::invalid_argument("online_gradient_exact: t out of range");
    if (round_betas.size() < static_cast<std::size_t>(t))
        throw std::invalid_argument("online_gradient_exact: missing per-round betas");

    double past = 0.0;
    double current = 0.0;
    for (int s = 0; s < t; ++s) {
        RoundRecord shifted = log.records[s];
        shifted.s_values += (beta_now - round_betas[s]) * shifted.phi;
        shifted.probs = softmax_probs(shifted.s_values, shifted.gamma);
        const double contribution = detail::score_term(shifted, shifted.mu_hat);
        past += contribution;
        if (s == t - 1) current = contribution;
    }
    return (past + (horizon - t) * current + eta * log.records[t - 1].norms.sum()) /
           static_cast<double>(horizon);
}

// Gradient-ascent step with nonnegativity clamp; a negative confidence
// width has no meaning for the index.
inline BetaParam update_beta(const BetaParam& param, double gradient, int iteration) {
    if (!(param.eta > 0.0)) throw std::invalid_argument("update_beta: eta must be > 0");
    if (!(param.learning_rate >= 0.0))
        throw std::invalid_argument("update_beta: learning_rate must be >= 0");
    if (iteration < 1) throw std::invalid_argument("update_beta: iteration must be >= 1");

    const double step = param.schedule == StepSchedule::kRobbinsMonro
                            ? param.learning_rate / static_cast<double>(iteration)
                            : param.learning_rate;
    BetaParam next = param;
    next.beta = std::max(0.0, param.beta + step * gradient);
    return next;
}

}  // namespace softucb
