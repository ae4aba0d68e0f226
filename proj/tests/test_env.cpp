#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "softucb/env.hpp"

using namespace softucb;
using Catch::Approx;

TEST_CASE("synthetic arms and parameter vector are unit length") {
    const Environment env = make_synthetic(50, 10, 0.5, 123);
    CHECK(env.arms.count() == 50);
    CHECK(env.arms.dimension() == 10);
    for (int i = 0; i < env.arms.count(); ++i)
        CHECK(env.arms.features().row(i).norm() == Approx(1.0).margin(1e-9));
    CHECK(env.theta.norm() == Approx(1.0).margin(1e-9));
    // linear reward model holds exactly
    for (int i = 0; i < env.arms.count(); ++i)
        CHECK(env.true_means[i] ==
              Approx(env.arms.features().row(i).dot(env.theta)).margin(1e-12));
}

TEST_CASE("generation is reproducible and seeds matter") {
    const Environment a = make_synthetic(20, 5, 0.5, 7);
    const Environment b = make_synthetic(20, 5, 0.5, 7);
    const Environment c = make_synthetic(20, 5, 0.5, 8);
    CHECK((a.arms.features() - b.arms.features()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.theta - b.theta).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.arms.features() - c.arms.features()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("degenerate generator arguments are rejected") {
    CHECK_THROWS_AS(make_synthetic(1, 5, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic(5, 0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic(5, 3, -0.1, 1), std::invalid_argument);
}

TEST_CASE("one-dimensional arms collapse to a sign") {
    const Environment env = make_synthetic(4, 1, 0.0, 99);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(std::abs(env.arms.features()(i, 0)) - 1.0) < 1e-12);
}

TEST_CASE("noiseless rewards reproduce the means") {
    Environment env = make_synthetic(10, 4, 0.5, 5);
    env.noise = NoiseModel::kNone;
    Rng rng(1);
    for (int i = 0; i < env.arms.count(); ++i)
        CHECK(draw_reward(env, i, rng) == env.true_means[i]);
}

TEST_CASE("gaussian noise centers on the mean") {
    Environment env = make_synthetic(5, 3, 0.5, 21);
    Rng rng(77);
    const int arm = 2;
    const int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += draw_reward(env, arm, rng);
    const double sample_mean = sum / draws;
    // 3 sigma / sqrt(n) band for sigma = 0.5
    CHECK(std::abs(sample_mean - env.true_means[arm]) < 0.005);
}

TEST_CASE("bernoulli rewards clamp the mean into a probability") {
    Environment env = make_synthetic(5, 3, 0.5, 22);
    env.noise = NoiseModel::kBernoulli;
    env.true_means[0] = 0.0;
    env.true_means[1] = 1.0;
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        CHECK(draw_reward(env, 0, rng) == 0.0);
        CHECK(draw_reward(env, 1, rng) == 1.0);
    }

    env.true_means[2] = 0.3;
    long hits = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) hits += draw_reward(env, 2, rng) > 0.5 ? 1 : 0;
    CHECK(std::abs(hits / static_cast<double>(draws) - 0.3) < 0.005);
}

TEST_CASE("reward draws do not mutate the environment") {
    const Environment env = make_synthetic(6, 3, 0.5, 11);
    const Eigen::VectorXd means_before = env.true_means;
    Rng rng(4);
    for (int i = 0; i < 100; ++i) draw_reward(env, i % 6, rng);
    CHECK((env.true_means - means_before).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(draw_reward(env, 6, rng), std::invalid_argument);
    CHECK_THROWS_AS(draw_reward(env, -1, rng), std::invalid_argument);
}
