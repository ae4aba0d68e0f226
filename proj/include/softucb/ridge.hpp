#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace softucb {

// Regularized least-squares state shared by every policy:
//
//   V = alpha*I + sum_s x_s x_s^T      (Gram matrix)
//   b = sum_s x_s y_s                  (response accumulator)
//   theta = V^{-1} b                   (ridge estimate)
//
// The inverse is maintained incrementally by Sherman-Morrison rank-one
// updates (O(d^2) per observation) and recomputed directly every
// kRefreshInterval updates to bound floating-point drift on long runs.
//
// One trajectory owns one RidgeState; instances are safe to move between
// threads but not to mutate concurrently.
class RidgeState {
public:
    static constexpr int kRefreshInterval = 512;

    RidgeState(int dimension, double alpha) : alpha_(alpha) {
        if (dimension < 1) throw std::invalid_argument("RidgeState: dimension must be >= 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("RidgeState: alpha must be > 0");
        gram_ = Eigen::MatrixXd::Identity(dimension, dimension) * alpha;
        gram_inv_ = Eigen::MatrixXd::Identity(dimension, dimension) / alpha;
        response_ = Eigen::VectorXd::Zero(dimension);
        theta_hat_ = Eigen::VectorXd::Zero(dimension);
    }

    int dimension() const { return static_cast<int>(gram_.rows()); }
    double alpha() const { return alpha_; }
    long rounds_observed() const { return rounds_observed_; }

    const Eigen::MatrixXd& gram() const { return gram_; }
    const Eigen::MatrixXd& gram_inv() const { return gram_inv_; }
    const Eigen::VectorXd& response() const { return response_; }
    const Eigen::VectorXd& theta_hat() const { return theta_hat_; }

    void update(const Eigen::VectorXd& x, double y) {
        check_vector(x);
        if (!std::isfinite(y)) throw std::invalid_argument("RidgeState::update: non-finite reward");

        gram_.selfadjointView<Eigen::Lower>().rankUpdate(x);
        gram_ = gram_.selfadjointView<Eigen::Lower>();
        response_ += x * y;

        // Sherman-Morrison: (V + xx^T)^{-1} = V^{-1} - V^{-1}x x^T V^{-1} / (1 + x^T V^{-1} x)
        const Eigen::VectorXd vx = gram_inv_ * x;
        const double denom = 1.0 + x.dot(vx);
        gram_inv_.noalias() -= (vx * vx.transpose()) / denom;

        ++rounds_observed_;
        if (rounds_observed_ % kRefreshInterval == 0) refresh_inverse();

        theta_hat_.noalias() = gram_inv_ * response_;
    }

    // ||x||_{V^{-1}} = sqrt(x^T V^{-1} x); clamped at zero against roundoff.
    double weighted_norm(const Eigen::VectorXd& x) const {
        check_vector(x);
        const double q = x.dot(gram_inv_ * x);
        return q > 0.0 ? std::sqrt(q) : 0.0;
    }

    double estimate_mean(const Eigen::VectorXd& x) const {
        check_vector(x);
        return x.dot(theta_hat_);
    }

    // Batched variants over an arm matrix (one row per arm); a single GEMM
    // instead of K separate mat-vec products dominates trajectory cost.
    Eigen::VectorXd estimate_means(const Eigen::MatrixXd& arms) const {
        return arms * theta_hat_;
    }

    Eigen::VectorXd weighted_norms(const Eigen::MatrixXd& arms) const {
        const Eigen::MatrixXd projected = arms * gram_inv_;
        return projected.cwiseProduct(arms).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
    }

private:
    void check_vector(const Eigen::VectorXd& x) const {
        if (x.size() != gram_.rows())
            throw std::invalid_argument("RidgeState: vector dimension mismatch");
        if (!x.allFinite()) throw std::invalid_argument("RidgeState: non-finite vector");
    }

    void refresh_inverse() {
        gram_inv_ = gram_.ldlt().solve(
            Eigen::MatrixXd::Identity(gram_.rows(), gram_.cols()));
    }

    Eigen::MatrixXd gram_;
    Eigen::MatrixXd gram_inv_;
    Eigen::VectorXd response_;
    Eigen::VectorXd theta_hat_;
    double alpha_;
    long rounds_observed_ = 0;
};

}  // namespace softucb
