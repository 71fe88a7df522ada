#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "ra3c/track.hpp"

using namespace ra3c;

TEST_CASE("generate_track: difficulty 0 keeps curvature gentle and full grip") {
    auto t = generate_track(42, 1500, 0.0);
    CHECK(t.length() == doctest::Approx(1500));
    for (const auto& p : t.points()) {
        CHECK(std::abs(p.kappa) <= 1.0 / 200);
        CHECK(p.mu == 1.0);
    }
}

TEST_CASE("generate_track: determinism is byte-exact through serialization") {
    auto a = track_to_string(generate_track(7, 2000, 0.5));
    auto b = track_to_string(generate_track(7, 2000, 0.5));
    CHECK(a == b);
    auto c = track_to_string(generate_track(8, 2000, 0.5));
    CHECK(a != c);
}

TEST_CASE("generate_track: difficulty 1 contains a hairpin") {
    auto t = generate_track(3, 2000, 1.0);
    double peak = 0;
    for (const auto& p : t.points()) peak = std::max(peak, std::abs(p.kappa));
    CHECK(peak >= 1.0 / 15);
}

TEST_CASE("generate_track: rejects bad parameters") {
    CHECK_THROWS_AS(generate_track(1, 100, 0.5), ValueError);
    CHECK_THROWS_AS(generate_track(1, 1000, 1.5), ValueError);
}

TEST_CASE("track: checkpoints are spaced and at least two exist") {
    auto t = generate_track(11, 2000, 0.3);
    CHECK(t.checkpoint_count() >= 2);
    CHECK(t.checkpoint_s(0) == 0.0);
    CHECK(t.checkpoint_s(1) == doctest::Approx(200));
    CHECK_THROWS_AS(t.checkpoint_s(t.checkpoint_count()), ValueError);
    // short track still gets two checkpoints
    auto small = generate_track(11, 220, 0.0);
    CHECK(small.checkpoint_count() >= 2);
}

TEST_CASE("track file round-trip is bit-exact") {
    auto t = generate_track(19, 800, 0.7);
    const std::string path = "/tmp/ra3c_test_track.trk";
    save_track(t, path);
    auto back = load_track(path);
    CHECK(track_to_string(back) == track_to_string(t));
    std::remove(path.c_str());
}

TEST_CASE("track parser rejects malformed input") {
    CHECK_THROWS_AS(track_from_string("nope"), IoError);
    CHECK_THROWS_AS(track_from_string("track-v1 100 200 1\n"), IoError);
}

TEST_CASE("track validation rejects invariant violations") {
    std::vector<TrackPoint> pts;
    for (int i = 0; i <= 150; ++i) pts.push_back({2.0 * i, 2.0 * i, 0, 6, 0, 0, 1});
    CHECK_NOTHROW(Track(pts, 100, 1));

    auto wide = pts;
    wide[3].r_w = 20;
    CHECK_THROWS_AS(Track(wide, 100, 1), ValueError);

    auto slippery = pts;
    slippery[5].mu = 0;
    CHECK_THROWS_AS(Track(slippery, 100, 1), ValueError);

    auto sharp = pts;
    sharp[4].kappa = 0.5;  // radius 2 m on a 6 m wide road
    CHECK_THROWS_AS(Track(sharp, 100, 1), ValueError);
}

TEST_CASE("projection: straight track round-trips (s, d) and signs d correctly") {
    std::vector<TrackPoint> pts;
    for (int i = 0; i <= 200; ++i) pts.push_back({2.0 * i, 2.0 * i, 0, 6, 0, 0, 1});
    Track t(pts, 100, 1);

    auto p = t.project(57.3, -1.25, 50);
    CHECK(p.s == doctest::Approx(57.3));
    CHECK(p.d == doctest::Approx(1.25));  // right of travel positive
    auto left = t.project(57.3, 1.5, 50);
    CHECK(left.d == doctest::Approx(-1.5));  // left negative

    auto [x, y] = t.reconstruct(p);
    CHECK(x == doctest::Approx(57.3).epsilon(1e-12));
    CHECK(y == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("projection: reconstruction error stays under 1e-6 on curvy tracks") {
    auto t = generate_track(23, 600, 0.8);
    Rng rng(9);
    double s_hint = 0;
    for (int i = 0; i < 400; ++i) {
        const double s = rng.uniform(0, t.length());
        const auto at = t.sample(s);
        const double off = rng.uniform(-4, 4);
        const double px = at.x + off * std::sin(at.tangent);
        const double py = at.y - off * std::cos(at.tangent);
        auto proj = t.project(px, py, i == 0 ? s : s_hint, 1e9);
        s_hint = proj.s;
        auto [rx, ry] = t.reconstruct(proj);
        CHECK(std::hypot(rx - px, ry - py) <= 1e-6);
    }
}

TEST_CASE("sample interpolates width and adherence") {
    std::vector<TrackPoint> pts;
    for (int i = 0; i <= 100; ++i) {
        TrackPoint p{2.0 * i, 2.0 * i, 0, 6, 0, 0, 1};
        p.r_w = (i < 50) ? 4.0 : 8.0;
        pts.push_back(p);
    }
    Track t(pts, 100, 1);
    CHECK(t.sample(99.0).r_w == doctest::Approx(6.0));  // midway through the 98->100 blend
    CHECK(t.sample(0).r_w == doctest::Approx(4.0));
    CHECK(t.sample(t.length()).r_w == doctest::Approx(8.0));
}
