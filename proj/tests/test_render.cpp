#include <cmath>

#include "doctest.h"
#include "ra3c/render.hpp"

using namespace ra3c;

static std::shared_ptr<Track> straight_track(double len = 600, double width = 6) {
    std::vector<TrackPoint> pts;
    for (double s = 0; s <= len + 1e-9; s += 2) pts.push_back({s, s, 0, width, 0, 0, 1});
    return std::make_shared<Track>(pts, 200, 1);
}

TEST_CASE("render: centered straight road is exactly left-right symmetric") {
    Simulator sim(straight_track());
    sim.spawn(0);
    RenderConfig cfg;
    cfg.width = 84;
    cfg.height = 84;
    auto rgb = render_frame_rgb(sim, cfg);
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width / 2; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(rgb[(size_t(y) * cfg.width + x) * 3 + size_t(c)] ==
                      rgb[(size_t(y) * cfg.width + (cfg.width - 1 - x)) * 3 + size_t(c)]);
}

TEST_CASE("render: deterministic across calls") {
    Simulator sim(straight_track());
    sim.spawn(0);
    RenderConfig cfg;
    cfg.width = 48;
    cfg.height = 48;
    CHECK(render_frame_rgb(sim, cfg) == render_frame_rgb(sim, cfg));
}

TEST_CASE("render: lateral offsets mirror each other") {
    auto track = straight_track();
    RenderConfig cfg;
    cfg.width = 64;
    cfg.height = 64;
    auto frame_at = [&](double d) {
        Simulator sim(track);
        sim.spawn(0);
        CarState st = sim.state();
        st.y = -d;  // left negative convention: world +y is left of the +x road
        // render straight from a shifted pose
        std::vector<uint8_t> rgb(size_t(cfg.width) * cfg.height * 3);
        Palette pal = Palette::for_track(*track, 0);
        CarState shifted = st;
        shifted.d = d;
        render_scene(shifted, *track, cfg, pal, rgb.data(), nullptr);
        return rgb;
    };
    auto right = frame_at(1.5);
    auto left = frame_at(-1.5);
    for (int y = 0; y < cfg.height; ++y)
        for (int x = 0; x < cfg.width; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(right[(size_t(y) * cfg.width + x) * 3 + size_t(c)] ==
                      left[(size_t(y) * cfg.width + (cfg.width - 1 - x)) * 3 + size_t(c)]);
}

TEST_CASE("render: class mask covers sky, ground, road and rail") {
    Simulator sim(straight_track());
    sim.spawn(0);
    RenderConfig cfg;
    cfg.width = 84;
    cfg.height = 84;
    auto mask = render_class_mask(sim, cfg);
    int counts[4] = {0, 0, 0, 0};
    for (uint8_t m : mask) {
        REQUIRE(m <= PX_RAIL);
        counts[m]++;
    }
    CHECK(counts[PX_SKY] > 100);
    CHECK(counts[PX_GROUND] > 100);
    CHECK(counts[PX_ROAD] > 200);
    CHECK(counts[PX_RAIL] > 10);
    // sky on top, road at the bottom center
    CHECK(mask[42] == PX_SKY);
    CHECK(mask[size_t(83) * 84 + 42] == PX_ROAD);
}

TEST_CASE("render: palettes derive deterministically from the track seed") {
    auto t1 = generate_track(100, 400, 0.2);
    auto t2 = generate_track(100, 400, 0.2);
    auto t3 = generate_track(101, 400, 0.2);
    CHECK(Palette::for_track(t1).sky == Palette::for_track(t2).sky);
    const auto p1 = Palette::for_track(t1);
    const auto p3 = Palette::for_track(t3);
    const bool differs = p1.sky != p3.sky || p1.ground != p3.ground || p1.road != p3.road;
    CHECK(differs);
}

TEST_CASE("render: low-adherence tracks get a snowy ground") {
    std::vector<TrackPoint> pts;
    for (double s = 0; s <= 400; s += 2) pts.push_back({s, s, 0, 6, 0, 0, 0.35});
    Track snowy(pts, 200, 77);
    auto pal = Palette::for_track(snowy);
    CHECK(pal.ground[0] > 200);  // bright/white terrain
}

TEST_CASE("frame_to_tensor scales into [0,1] planar layout") {
    std::vector<uint8_t> rgb = {0, 128, 255, 64, 0, 32};  // 1x2 image
    auto t = frame_to_tensor<float>(rgb, 1, 2);
    CHECK(t.shape == std::vector<int>{3, 1, 2});
    CHECK(t.data[0] == doctest::Approx(0.0));        // R of px0
    CHECK(t.data[1] == doctest::Approx(64.0 / 255)); // R of px1
    CHECK(t.data[2] == doctest::Approx(128.0 / 255));
    CHECK(t.data[5] == doctest::Approx(32.0 / 255));
    CHECK_THROWS_AS(frame_to_tensor<float>(rgb, 2, 2), ShapeError);
}

TEST_CASE("observe packages frame, speed and metadata consistently") {
    Simulator sim(straight_track());
    sim.spawn(0);
    for (int i = 0; i < 30; ++i) sim.step(ControlCommand{0, 1, false, false});
    RenderConfig cfg;
    cfg.width = 48;
    cfg.height = 48;
    auto obs = observe(sim, cfg, 14);
    CHECK(obs.h == 48);
    CHECK(obs.frame_rgb.size() == size_t(48) * 48 * 3);
    CHECK(obs.speed == doctest::Approx(sim.state().v));
    CHECK(obs.prev_action == 14);
    CHECK(obs.signal.v == doctest::Approx(sim.state().v));
    CHECK(obs.progress == doctest::Approx(sim.state().s / sim.track().length()));
}
