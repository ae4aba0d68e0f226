#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "softucb/arms.hpp"
#include "softucb/rng.hpp"

namespace softucb {

enum class NoiseModel { kGaussian, kBernoulli, kNone };

// Immutable reward generator. Synthetic instances carry the parameter
// vector (means are exactly features * theta); dataset instances carry
// per-arm means directly, with theta left empty. Reward draws advance only
// the caller's stream.
struct Environment {
    ArmSet arms;
    Eigen::VectorXd theta;       // empty in dataset mode
    Eigen::VectorXd true_means;  // one entry per arm
    NoiseModel noise = NoiseModel::kGaussian;
    double noise_scale = 0.5;

    int best_arm() const {
        int best = 0;
        for (int i = 1; i < true_means.size(); ++i)
            if (true_means[i] > true_means[best]) best = i;
        return best;
    }
    double best_mean() const { return true_means[best_arm()]; }
};

// Arm features drawn componentwise uniform on [-1, 1] and row-normalized
// to unit vectors; theta is a random unit vector.
inline Environment make_synthetic(int arm_count, int dimension, double noise_scale,
                                  std::uint64_t seed) {
    if (arm_count < 2) throw std::invalid_argument("make_synthetic: arm_count must be >= 2");
    if (dimension < 1) throw std::invalid_argument("make_synthetic: dimension must be >= 1");
    if (!(noise_scale >= 0.0))
        throw std::invalid_argument("make_synthetic: noise_scale must be >= 0");

    Rng rng(seed);
    Eigen::MatrixXd features(arm_count, dimension);
    for (int i = 0; i < arm_count; ++i) {
        double norm = 0.0;
        do {
            for (int j = 0; j < dimension; ++j) features(i, j) = rng.uniform(-1.0, 1.0);
            norm = features.row(i).norm();
        } while (norm < 1e-12);
        features.row(i) /= norm;
    }

    Eigen::VectorXd theta(dimension);
    double norm = 0.0;
    do {
        for (int j = 0; j < dimension; ++j) theta[j] = rng.normal();
        norm = theta.norm();
    } while (norm < 1e-12);
    theta /= norm;

    Environment env{ArmSet(std::move(features)), theta, Eigen::VectorXd(),
                    NoiseModel::kGaussian, noise_scale};
    env.true_means = env.arms.features() * theta;
    return env;
}

inline Environment make_dataset_environment(Eigen::MatrixXd features,
                                            Eigen::VectorXd true_means, NoiseModel noise,
                                            double noise_scale) {
    if (features.rows() != true_means.size())
        throw std::invalid_argument("make_dataset_environment: arm/mean count mismatch");
    if (!true_means.allFinite())
        throw std::invalid_argument("make_dataset_environment: non-finite mean");
    Environment env{ArmSet(std::move(features)), Eigen::VectorXd(), std::move(true_means),
                    noise, noise_scale};
    return env;
}

inline double draw_reward(const Environment& env, int arm, Rng& rng) {
    if (arm < 0 || arm >= env.arms.count())
        throw std::invalid_argument("draw_reward: arm index out of range");
    const double mean = env.true_means[arm];
    switch (env.noise) {
        case NoiseModel::kGaussian:
            return mean + env.noise_scale * rng.normal();
        case NoiseModel::kBernoulli:
            return rng.uniform() < std::clamp(mean, 0.0, 1.0) ? 1.0 : 0.0;
        case NoiseModel::kNone:
            return mean;
    }
    return mean;
}

}  // namespace softucb
