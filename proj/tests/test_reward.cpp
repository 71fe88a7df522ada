#include <cmath>

#include "doctest.h"
#include "ra3c/reward.hpp"

using namespace ra3c;

static FrameSignal sig(double v, double alpha, double d, double r_w = 6) {
    return FrameSignal{v, alpha, d, r_w};
}

TEST_CASE("compute_reward: pinned examples") {
    CHECK(compute_reward(RewardKind::Center, sig(20, 0, 0)) == doctest::Approx(20));
    CHECK(compute_reward(RewardKind::Sigmoid, sig(10, 0, 2, 4)) == doctest::Approx(5));  // |d| = 0.5*r_w
    CHECK(compute_reward(RewardKind::Margin, sig(20, 0, 1.0, 4)) == doctest::Approx(20));
    CHECK(compute_reward(RewardKind::AngleOnly, sig(15, kPi / 3, 0)) == doctest::Approx(7.5));
}

TEST_CASE("compute_reward: rejects invalid frame signals") {
    CHECK_THROWS_AS(compute_reward(RewardKind::Center, sig(10, 0, 0, 0)), ValueError);      // r_w <= 0
    CHECK_THROWS_AS(compute_reward(RewardKind::Center, sig(10, 4.0, 0)), ValueError);       // alpha out of range
    CHECK_THROWS_AS(compute_reward(RewardKind::Center, sig(NAN, 0, 0)), ValueError);
}

TEST_CASE("all rewards are nonincreasing in |d| at fixed v > 0 and alpha") {
    for (auto kind : {RewardKind::AngleOnly, RewardKind::Center, RewardKind::Margin, RewardKind::Sigmoid}) {
        double prev = 1e300;
        for (double d = 0; d <= 8; d += 0.25) {
            const double r = compute_reward(kind, sig(10, 0.3, d, 6));
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
    }
    // Center and Sigmoid strictly decreasing; Margin flat inside the half width
    CHECK(compute_reward(RewardKind::Center, sig(10, 0, 0.5)) > compute_reward(RewardKind::Center, sig(10, 0, 1.0)));
    CHECK(compute_reward(RewardKind::Sigmoid, sig(10, 0, 0.5)) > compute_reward(RewardKind::Sigmoid, sig(10, 0, 1.0)));
    CHECK(compute_reward(RewardKind::Margin, sig(10, 0, 0.5, 6)) ==
          doctest::Approx(compute_reward(RewardKind::Margin, sig(10, 0, 2.9, 6))));
}

TEST_CASE("rewards coincide at d = 0 up to the sigmoid's residual offset") {
    const double v = 13, alpha = 0.4, r_w = 7;
    const double angle_only = compute_reward(RewardKind::AngleOnly, sig(v, alpha, 0, r_w));
    CHECK(compute_reward(RewardKind::Center, sig(v, alpha, 0, r_w)) == doctest::Approx(angle_only));
    CHECK(compute_reward(RewardKind::Margin, sig(v, alpha, 0, r_w)) == doctest::Approx(angle_only));
    const double sigma = 1.0 / (1.0 + std::exp(2 * r_w));  // logistic(-2*r_w)
    CHECK(compute_reward(RewardKind::Sigmoid, sig(v, alpha, 0, r_w)) == doctest::Approx(angle_only - v * sigma));
}

TEST_CASE("rewards are linear in v") {
    for (auto kind : {RewardKind::AngleOnly, RewardKind::Center, RewardKind::Margin, RewardKind::Sigmoid}) {
        const double r1 = compute_reward(kind, sig(5, 0.2, 1.5, 5));
        const double r2 = compute_reward(kind, sig(15, 0.2, 1.5, 5));
        CHECK(r2 == doctest::Approx(3 * r1));
    }
}

TEST_CASE("center with d = 0 reduces to the angle-only baseline") {
    for (double v : {0.0, 7.5, 30.0})
        for (double a : {-1.0, 0.0, 0.9})
            CHECK(compute_reward(RewardKind::Center, sig(v, a, 0)) ==
                  doctest::Approx(compute_reward(RewardKind::AngleOnly, sig(v, a, 0))));
}

TEST_CASE("discounted_return: examples and validation") {
    std::vector<double> single{4.5};
    CHECK(discounted_return(single, 0.9) == doctest::Approx(4.5));
    std::vector<double> ones{1, 1, 1};
    CHECK(discounted_return(ones, 0.5) == doctest::Approx(1.75));
    std::vector<double> zeros{0, 0, 0, 0};
    CHECK(discounted_return(zeros, 0.99) == 0.0);
    CHECK_THROWS_AS(discounted_return(ones, 1.0), ValueError);
    CHECK_THROWS_AS(discounted_return(ones, -0.1), ValueError);
}

TEST_CASE("discounted_return matches the direct power-series oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> r;
        const int n = 1 + rng.uniform_int(12);
        for (int i = 0; i < n; ++i) r.push_back(rng.uniform(-5, 5));
        const double gamma = rng.uniform(0, 0.999);
        double direct = 0;
        for (int i = 0; i < n; ++i) direct += std::pow(gamma, i) * r[size_t(i)];
        CHECK(discounted_return(r, gamma) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("reward kind parsing") {
    CHECK(reward_kind_from_string("center") == RewardKind::Center);
    CHECK(reward_kind_from_string("angle_only") == RewardKind::AngleOnly);
    CHECK(reward_kind_from_string("margin") == RewardKind::Margin);
    CHECK(reward_kind_from_string("sigmoid") == RewardKind::Sigmoid);
    CHECK_THROWS_AS(reward_kind_from_string("bogus"), ValueError);
}
