// Minimal library walkthrough: build a synthetic instance, train the
// confidence width offline, and compare the resulting policy against the
// optimistic baseline.

#include <iostream>

#include "softucb/env.hpp"
#include "softucb/runners.hpp"

int main() {
    using namespace softucb;

    const Environment env = make_synthetic(/*arm_count=*/20, /*dimension=*/5,
                                           /*noise_scale=*/0.5, /*seed=*/7);

    RunConfig config;
    config.horizon = 256;
    config.trajectories = 200;
    config.learning_rate = 0.02;
    config.eta = 3e-3;
    config.schedule = StepSchedule::kRobbinsMonro;
    config.keep_trajectory_logs = false;
    config.seed = 7;

    const OfflineTraining training = train_offline(env, config);
    const double width_bound = theoretical_beta(config.bound_r, config.bound_delta,
                                                env.arms.dimension(), config.horizon,
                                                config.alpha, config.bound_c);
    std::cout << "learned width: " << training.beta_hat << " (bound " << width_bound << ")\n";

    const RunResult tuned = run_softucb(env, config, training.beta_hat);
    const RunResult baseline = run_linucb(env, config);
    std::cout << "final regret, tuned softmax policy: " << tuned.expected_regret_curve.back()
              << "\n";
    std::cout << "final regret, optimistic baseline:  "
              << baseline.expected_regret_curve.back() << "\n";
    return 0;
}
