#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "ra3c/net.hpp"

using namespace ra3c;

static Observation fake_obs(int h, int w, uint8_t fill = 100, double speed = 10, int prev = 3) {
    Observation o;
    o.h = h;
    o.w = w;
    o.frame_rgb.assign(size_t(h) * w * 3, fill);
    o.speed = speed;
    o.prev_action = prev;
    o.progress = 0.25;
    return o;
}

TEST_CASE("build: Ours at 3x84x84 completes the documented stack and yields a 32-way policy") {
    PolicyNet net(NetConfig::for_variant(EncoderVariant::Ours), 42);
    auto out = net.forward(fake_obs(84, 84), net.initial_hidden(), net.initial_hidden());
    REQUIRE(out.policy.size() == 32);
    double sum = 0;
    for (float p : out.policy) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-6);
    CHECK(std::isfinite(out.value));
}

TEST_CASE("build: Mnih has strictly fewer parameters than Ours") {
    PolicyNet ours(NetConfig::for_variant(EncoderVariant::Ours), 1);
    PolicyNet mnih(NetConfig::for_variant(EncoderVariant::Mnih), 1);
    CHECK(mnih.params().flat_count() < ours.params().flat_count());
}

TEST_CASE("build: same seed twice gives bit-identical parameter sets") {
    PolicyNet a(NetConfig::for_variant(EncoderVariant::Ours), 7);
    PolicyNet b(NetConfig::for_variant(EncoderVariant::Ours), 7);
    REQUIRE(a.params().segments.size() == b.params().segments.size());
    for (size_t i = 0; i < a.params().segments.size(); ++i)
        CHECK(a.params().segments[i].tensor.data == b.params().segments[i].tensor.data);
    PolicyNet c(NetConfig::for_variant(EncoderVariant::Ours), 8);
    CHECK(a.params().segments[0].tensor.data != c.params().segments[0].tensor.data);
}

TEST_CASE("build: rejects inputs too small for the stack") {
    NetConfig cfg = NetConfig::for_variant(EncoderVariant::Ours);
    cfg.height = 12;
    cfg.width = 12;
    CHECK_THROWS_AS(PolicyNet(cfg, 1), ShapeError);
}

TEST_CASE("heads share every segment except their own final layer") {
    PolicyNet net(NetConfig::for_variant(EncoderVariant::Ours), 3);
    std::set<std::string> names;
    for (const auto& s : net.params().segments) names.insert(s.name);
    CHECK(names.count("policy.w"));
    CHECK(names.count("policy.b"));
    CHECK(names.count("value.w"));
    CHECK(names.count("value.b"));
    // exactly these four segments are head-specific
    int head_segments = 0;
    for (const auto& n : names)
        if (n.rfind("policy.", 0) == 0 || n.rfind("value.", 0) == 0) ++head_segments;
    CHECK(head_segments == 4);
}

TEST_CASE("forward: repeated calls with identical inputs match exactly") {
    NetConfig cfg = NetConfig::for_variant(EncoderVariant::Mnih);
    cfg.height = 48;
    cfg.width = 48;
    cfg.lstm_size = 32;
    PolicyNet net(cfg, 11);
    auto obs = fake_obs(48, 48, 77, 22, 5);
    auto a = net.forward(obs, net.initial_hidden(), net.initial_hidden());
    auto b = net.forward(obs, net.initial_hidden(), net.initial_hidden());
    CHECK(a.policy == b.policy);
    CHECK(a.value == b.value);
    CHECK(a.h.data == b.h.data);
}

TEST_CASE("forward: zero-weight network gives the uniform policy and zero value") {
    NetConfig cfg = NetConfig::for_variant(EncoderVariant::Mnih);
    cfg.height = 32;
    cfg.width = 32;
    cfg.lstm_size = 16;
    PolicyNet net(cfg, 1);
    for (auto& s : net.params().segments)
        for (auto& v : s.tensor.data) v = 0;
    auto out = net.forward(fake_obs(32, 32, 200), net.initial_hidden(), net.initial_hidden());
    for (float p : out.policy) CHECK(p == doctest::Approx(1.0 / 32).epsilon(1e-6));
    CHECK(out.value == doctest::Approx(0));
}

TEST_CASE("forward: rejects mismatched frames") {
    PolicyNet net(NetConfig::for_variant(EncoderVariant::Mnih), 2);
    CHECK_THROWS_AS(net.forward(fake_obs(48, 48), net.initial_hidden(), net.initial_hidden()), ShapeError);
}

TEST_CASE("recurrence: carrying hidden state differs from resetting it") {
    NetConfig cfg = NetConfig::for_variant(EncoderVariant::Mnih);
    cfg.height = 32;
    cfg.width = 32;
    cfg.lstm_size = 16;
    PolicyNet net(cfg, 9);
    auto obs = fake_obs(32, 32, 120);

    auto h = net.initial_hidden();
    auto c = net.initial_hidden();
    NetOutput carried;
    for (int i = 0; i < 3; ++i) {
        carried = net.forward(obs, h, c);
        h = carried.h;
        c = carried.c;
    }
    auto reset = net.forward(obs, net.initial_hidden(), net.initial_hidden());
    double diff = 0;
    for (size_t i = 0; i < carried.policy.size(); ++i) diff += std::abs(carried.policy[i] - reset.policy[i]);
    CHECK(diff > 1e-6);
}

TEST_CASE("guided_backprop: input-shaped, non-negative, rejects bad classes") {
    NetConfig cfg = NetConfig::for_variant(EncoderVariant::Mnih);
    cfg.height = 48;
    cfg.width = 48;
    cfg.lstm_size = 32;
    PolicyNet net(cfg, 21);
    Observation obs = fake_obs(48, 48, 90);
    // give the frame some structure
    for (size_t i = 0; i < obs.frame_rgb.size(); i += 7) obs.frame_rgb[i] = uint8_t(i % 251);
    auto sal = net.guided_backprop(obs, net.initial_hidden(), net.initial_hidden(), 4);
    CHECK(sal.shape == std::vector<int>{48, 48});
    for (float v : sal.data) CHECK(v >= 0);
    double total = 0;
    for (float v : sal.data) total += v;
    CHECK(total > 0);  // something responds
    CHECK_THROWS_AS(net.guided_backprop(obs, net.initial_hidden(), net.initial_hidden(), 32), ValueError);
}

TEST_CASE("checkpoint round-trip rebuilds the architecture from the file") {
    NetConfig cfg = NetConfig::for_variant(EncoderVariant::Mnih);
    cfg.height = 48;
    cfg.width = 48;
    cfg.lstm_size = 24;
    cfg.feed_speed_action = true;
    PolicyNet net(cfg, 5);
    const std::string path = "/tmp/ra3c_test_net.ck";
    save_net_checkpoint(net, path);
    PolicyNet back = load_net_checkpoint(path);
    CHECK(back.config().variant == EncoderVariant::Mnih);
    CHECK(back.config().height == 48);
    CHECK(back.config().lstm_size == 24);
    CHECK(back.config().feed_speed_action);
    auto obs = fake_obs(48, 48, 60, 15, 2);
    auto a = net.forward(obs, net.initial_hidden(), net.initial_hidden());
    auto b = back.forward(obs, back.initial_hidden(), back.initial_hidden());
    CHECK(a.policy == b.policy);
    CHECK(a.value == b.value);
    std::remove(path.c_str());
}
