#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "ra3c/actions.hpp"

using namespace ra3c;

TEST_CASE("class_to_control: pinned examples") {
    auto c0 = class_to_control(0);
    CHECK(c0.steering == -1.0);
    CHECK(c0.gas == 0.0);
    CHECK_FALSE(c0.brake);
    CHECK_FALSE(c0.handbrake);

    auto c31 = class_to_control(31);
    CHECK(c31.steering == 0.0);
    CHECK(c31.gas == 0.0);
    CHECK(c31.brake);
    CHECK_FALSE(c31.handbrake);

    auto c14 = class_to_control(14);  // s=4 -> steering 0, g=2 -> gas 1
    CHECK(c14.steering == 0.0);
    CHECK(c14.gas == 1.0);

    CHECK_THROWS_AS(class_to_control(32), ValueError);
    CHECK_THROWS_AS(class_to_control(-1), ValueError);
}

TEST_CASE("enumerate_table: partition 27/4/1 with 18 gas-positive classes") {
    auto table = enumerate_table();
    REQUIRE(table.size() == 32);
    int driving = 0, handbrake = 0, brake = 0, gas_pos = 0;
    std::set<double> hb_steer;
    for (const auto& [idx, cmd] : table) {
        CHECK_FALSE((cmd.brake && cmd.handbrake));
        if (cmd.handbrake) {
            ++handbrake;
            hb_steer.insert(cmd.steering);
            CHECK(cmd.gas == 0.0);
        } else if (cmd.brake) {
            ++brake;
        } else {
            ++driving;
        }
        if (cmd.gas > 0) ++gas_pos;
    }
    CHECK(driving == 27);
    CHECK(handbrake == 4);
    CHECK(brake == 1);
    CHECK(gas_pos == 18);
    CHECK(hb_steer == std::set<double>{-1.0, -0.5, 0.5, 1.0});
}

TEST_CASE("class_to_control is a bijection and round-trips") {
    std::set<std::tuple<double, double, bool, bool>> seen;
    for (int i = 0; i < 32; ++i) {
        auto c = class_to_control(i);
        seen.insert({c.steering, c.gas, c.brake, c.handbrake});
        CHECK(control_to_class(c) == i);
    }
    CHECK(seen.size() == 32);  // 32 distinct commands
}

TEST_CASE("sample_action: one-hot always returns its class") {
    std::vector<float> p(32, 0.f);
    p[7] = 1.f;
    Rng rng(3);
    for (int i = 0; i < 50; ++i) CHECK(sample_action(p, rng) == 7);
}

TEST_CASE("sample_action: rejects bad distributions") {
    Rng rng(3);
    std::vector<float> p(32, 0.04f);  // sums to 1.28
    CHECK_THROWS_AS(sample_action(p, rng), ValueError);
    std::vector<float> neg(2, 0.5f);
    neg[0] = -0.1f;
    neg[1] = 1.1f;
    CHECK_THROWS_AS(sample_action(neg, rng), ValueError);
}

TEST_CASE("sample_action: uniform frequencies within 3 sigma over 1e5 draws") {
    const int n = 100000;
    std::vector<float> p(32, 1.0f / 32);
    Rng rng(12345);
    std::vector<int> counts(32, 0);
    for (int i = 0; i < n; ++i) counts[size_t(sample_action(p, rng))]++;
    const double mean = double(n) / 32;
    const double sigma = std::sqrt(double(n) * (1.0 / 32) * (31.0 / 32));
    for (int c : counts) CHECK(std::abs(c - mean) <= 3 * sigma);
}

TEST_CASE("sample_action: same seed gives the same sequence") {
    std::vector<float> p(32, 1.0f / 32);
    Rng a(77), b(77);
    for (int i = 0; i < 200; ++i) CHECK(sample_action(p, a) == sample_action(p, b));
}
