#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "softucb/rng.hpp"

namespace softucb {

// Per-round view of the arm indices:
//
//   leader      arm maximizing the lower confidence bound mu_hat - beta*norm
//   delta_hat   estimated gap mu_hat[leader] - mu_hat[i]
//   phi         norms[i] + norms[leader]
//   s_values    beta*phi - delta_hat
//
// Arms split into upper_set (s >= 0, candidates) and lower_set (s < 0,
// flagged suboptimal and softly eliminated by the policy).
struct IndexSnapshot {
    Eigen::VectorXd s_values;
    Eigen::VectorXd phi;
    Eigen::VectorXd delta_hat;
    Eigen::VectorXd norms;
    Eigen::VectorXd mu_hat;
    int leader = 0;
    std::vector<int> upper_set;
    std::vector<int> lower_set;
    double s_max_upper = 0.0;

    int arm_count() const { return static_cast<int>(s_values.size()); }
};

// Arm-selection distribution produced by the softmax over indices.
struct Policy {
    Eigen::VectorXd probs;
    double gamma = 0.0;
};

// Coldness ceiling: with max-subtracted softmax this is numerically safe
// and practically indistinguishable from hard elimination.
inline constexpr double kGammaCap = 1e6;
// Below this, the top index carries no usable scale for calibration.
inline constexpr double kSMaxEpsilon = 1e-12;

inline int compute_leader(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& norms,
                          double beta) {
    if (mu_hat.size() == 0) throw std::invalid_argument("compute_leader: empty arm set");
    if (mu_hat.size() != norms.size())
        throw std::invalid_argument("compute_leader: mu_hat/norms length mismatch");
    int best = 0;
    double best_lcb = mu_hat[0] - beta * norms[0];
    for (int i = 1; i < mu_hat.size(); ++i) {
        const double lcb = mu_hat[i] - beta * norms[i];
        if (lcb > best_lcb) {  // ties keep the smallest index
            best_lcb = lcb;
            best = i;
        }
    }
    return best;
}

inline IndexSnapshot compute_indices(const Eigen::VectorXd& mu_hat,
                                     const Eigen::VectorXd& norms, double beta) {
    IndexSnapshot snap;
    snap.leader = compute_leader(mu_hat, norms, beta);
    snap.mu_hat = mu_hat;
    snap.norms = norms;
    snap.delta_hat = Eigen::VectorXd::Constant(mu_hat.size(), mu_hat[snap.leader]) - mu_hat;
    snap.phi = norms.array() + norms[snap.leader];
    snap.s_values = beta * snap.phi - snap.delta_hat;

    snap.s_max_upper = 0.0;
    for (int i = 0; i < snap.s_values.size(); ++i) {
        if (snap.s_values[i] >= 0.0) {
            snap.upper_set.push_back(i);
            if (snap.s_values[i] > snap.s_max_upper) snap.s_max_upper = snap.s_values[i];
        } else {
            snap.lower_set.push_back(i);
        }
    }
    return snap;
}

// Coldness calibration: smallest nonnegative gamma such that the upper set
// keeps total probability at least delta (treated as a lower bound on
// admissible gamma, then clamped into [0, kGammaCap]).
//
// When the top index is degenerate (s_max_upper <= kSMaxEpsilon) while
// suboptimal arms exist, no finite gamma separates the sets; the cap is
// returned and *capped is set so callers can surface the event.
inline double compute_gamma(const IndexSnapshot& snap, double delta, bool* capped = nullptr) {
    if (capped) *capped = false;
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("compute_gamma: delta must be in (0,1)");
    if (snap.lower_set.empty()) return 0.0;

    if (snap.s_max_upper <= kSMaxEpsilon) {
        if (capped) *capped = true;
        return kGammaCap;
    }
    const double lower_count = static_cast<double>(snap.lower_set.size());
    const double gamma = std::log(delta * lower_count / (1.0 - delta)) / snap.s_max_upper;
    if (gamma <= 0.0) return 0.0;
    if (gamma >= kGammaCap) {
        if (capped) *capped = true;
        return kGammaCap;
    }
    return gamma;
}

// Softmax over gamma * s with max-subtraction for overflow safety.
inline Eigen::VectorXd softmax_probs(const Eigen::VectorXd& s, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("softmax_probs: gamma must be >= 0");
    const Eigen::ArrayXd scaled = gamma * s.array();
    const Eigen::ArrayXd shifted = scaled - scaled.maxCoeff();
    const Eigen::ArrayXd weights = shifted.exp();
    return weights / weights.sum();
}

inline Policy softmax_policy(const IndexSnapshot& snap, double gamma) {
    Policy policy;
    policy.gamma = gamma;
    policy.probs = softmax_probs(snap.s_values, gamma);
    return policy;
}

// Inverse-CDF draw; consumes one uniform from the caller-owned stream.
inline int sample_arm(const Policy& policy, Rng& rng) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    const int k = static_cast<int>(policy.probs.size());
    for (int i = 0; i < k; ++i) {
        cumulative += policy.probs[i];
        if (u < cumulative) return i;
    }
    return k - 1;  // u landed in terminal roundoff gap
}

}  // namespace softucb
