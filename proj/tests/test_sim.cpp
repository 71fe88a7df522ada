#include <cmath>

#include "doctest.h"
#include "ra3c/sim.hpp"

using namespace ra3c;

static std::shared_ptr<Track> straight_track(double len = 1000, double width = 6) {
    std::vector<TrackPoint> pts;
    for (double s = 0; s <= len + 1e-9; s += 2) pts.push_back({s, s, 0, width, 0, 0, 1});
    return std::make_shared<Track>(pts, 200, 1);
}

static ControlCommand cmd(double steer, double gas, bool brake = false, bool hb = false) {
    return ControlCommand{steer, gas, brake, hb};
}

TEST_CASE("spawn: at rest on the centerline, aligned with the road") {
    auto track = std::make_shared<Track>(generate_track(5, 800, 0.5));
    Simulator sim(track);
    for (int c = 0; c < track->checkpoint_count(); ++c) {
        sim.spawn(c);
        CHECK(sim.state().v == 0.0);
        CHECK(sim.state().d == doctest::Approx(0).epsilon(1e-9));
        CHECK(sim.state().s == doctest::Approx(track->checkpoint_s(c)));
        CHECK(sim.frame_signal().alpha == doctest::Approx(0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(sim.spawn(track->checkpoint_count()), ValueError);
}

TEST_CASE("full gas on a straight road accelerates without drifting off center") {
    Simulator sim(straight_track());
    sim.spawn(0);
    double prev_v = 0;
    for (int i = 0; i < 200; ++i) {
        sim.step(cmd(0, 1));
        CHECK(sim.state().v > prev_v);
        prev_v = sim.state().v;
        CHECK(std::abs(sim.state().d) < 1e-9);
    }
    CHECK(prev_v > 10);
}

TEST_CASE("coasting decays speed strictly (drag)") {
    Simulator sim(straight_track());
    sim.spawn(0);
    for (int i = 0; i < 150; ++i) sim.step(cmd(0, 1));
    double v = sim.state().v;
    for (int i = 0; i < 60; ++i) {
        sim.step(cmd(0, 0));
        CHECK(sim.state().v < v);
        v = sim.state().v;
    }
}

TEST_CASE("braking stops the car faster than coasting and v never goes negative") {
    Simulator sim(straight_track());
    sim.spawn(0);
    for (int i = 0; i < 150; ++i) sim.step(cmd(0, 1));
    int steps = 0;
    while (sim.state().v > 0 && steps < 400) {
        sim.step(cmd(0, 0, true));
        ++steps;
    }
    CHECK(sim.state().v == 0.0);
    CHECK(steps < 90);  // ~20+ m/s against 12 m/s^2
}

TEST_CASE("kinetic energy is nonincreasing without gas on flat ground") {
    Simulator sim(straight_track());
    sim.spawn(0);
    for (int i = 0; i < 120; ++i) sim.step(cmd(0, 1));
    double ke = sim.state().v * sim.state().v + sim.state().slip * sim.state().slip;
    Rng rng(4);
    for (int i = 0; i < 150 && !sim.episode_over(); ++i) {
        sim.step(cmd(rng.uniform(-1, 1), 0, false, rng.uniform() < 0.2));
        const double now = sim.state().v * sim.state().v + sim.state().slip * sim.state().slip;
        CHECK(now <= ke + 1e-9);
        ke = now;
    }
}

TEST_CASE("closed-loop arc following stays within half a meter of center") {
    // constant-curvature ring segment: R = 120 m
    std::vector<TrackPoint> pts;
    const double R = 120;
    for (double s = 0; s <= 900; s += 2)
        pts.push_back({s, R * std::sin(s / R), R * (1 - std::cos(s / R)), 7, 1.0 / R, 0.02, 1});
    auto track = std::make_shared<Track>(pts, 200, 1);
    Simulator sim(track);
    sim.spawn(0);

    // proportional steering oracle: feedforward curvature + centering terms
    // (d is right-positive while positive steering turns left, so the d term
    // enters with a plus sign)
    for (int i = 0; i < 300; ++i) {  // 10 s
        const auto sig = sim.frame_signal();
        const auto road = track->sample(sim.state().s);
        const double ff = std::atan(road.kappa * sim.config().wheelbase) / sim.config().steer_max_rad;
        const double steer = clamp(ff + 0.08 * sig.d - 0.6 * sig.alpha, -1, 1);
        sim.step(cmd(steer, sim.state().v < 14 ? 1.0 : 0.0));
        CHECK(std::abs(sim.state().d) < 0.5);
    }
    CHECK(sim.state().v > 10);
}

TEST_CASE("lateral demand beyond adherence on a slippery patch produces slip") {
    std::vector<TrackPoint> pts;
    for (double s = 0; s <= 600; s += 2) pts.push_back({s, s, 0, 8, 0, 0, 0.3});  // snow-like
    Simulator sim(std::make_shared<Track>(pts, 200, 1));
    sim.spawn(0);
    for (int i = 0; i < 220; ++i) sim.step(cmd(0, 1));
    CHECK(sim.state().v > 15);
    sim.step(cmd(1.0, 0));  // hard turn far beyond 0.3 g
    CHECK(std::abs(sim.state().slip) > 0.01);
}

TEST_CASE("slow drift into the rail clamps exactly to the half width and scales speed") {
    Simulator sim(straight_track(1000, 6));
    sim.spawn(0);
    for (int i = 0; i < 150; ++i) sim.step(cmd(0, 1));
    const double v_before = sim.state().v;

    // small steering so lateral speed at the rail stays below the breach level
    StepEvents ev;
    int hits = 0;
    double v_at_hit = 0;
    for (int i = 0; i < 400 && !sim.episode_over(); ++i) {
        ev = sim.step(cmd(0.03, 1));
        if (ev.hit) {
            ++hits;
            v_at_hit = sim.state().v;
            break;
        }
    }
    REQUIRE(hits == 1);
    CHECK(std::abs(sim.state().d) == doctest::Approx(3.0));  // clamped to 0.5 * r_w
    CHECK(v_at_hit < v_before);

    // keep pushing against the rail: no second hit while pressed
    for (int i = 0; i < 30 && !sim.episode_over(); ++i) {
        ev = sim.step(cmd(0.03, 1));
        CHECK_FALSE(ev.hit);
        CHECK(std::abs(sim.state().d) == doctest::Approx(3.0));
    }
}

TEST_CASE("fast lateral impact breaches the rail and ends off-road") {
    Simulator sim(straight_track(1000, 6));
    sim.spawn(0);
    for (int i = 0; i < 250; ++i) sim.step(cmd(0, 1));
    CHECK(sim.state().v > 25);

    // full-lock handbrake turn at speed carries the car through the rail
    bool crashed = false;
    CrashReason reason = CrashReason::None;
    for (int i = 0; i < 300 && !sim.episode_over(); ++i) {
        auto ev = sim.step(cmd(1.0, 0, false, true));
        if (ev.crash) {
            crashed = true;
            reason = ev.reason;
            break;
        }
    }
    CHECK(crashed);
    CHECK((reason == CrashReason::OffRoad || reason == CrashReason::WrongWay));
}

TEST_CASE("stall crash after five seconds of no progress") {
    Simulator sim(straight_track());
    sim.spawn(0);
    StepEvents last;
    int steps = 0;
    while (!sim.episode_over() && steps < 400) {
        last = sim.step(cmd(0, 0));  // never throttle
        ++steps;
    }
    CHECK(last.crash);
    CHECK(last.reason == CrashReason::Stalled);
    CHECK(steps >= 150);  // not before the stall window
    CHECK(steps <= 160);
    CHECK_THROWS_AS(sim.step(cmd(0, 1)), Error);  // episode over until respawn
    sim.spawn(0);
    CHECK_NOTHROW(sim.step(cmd(0, 1)));
}

TEST_CASE("wrong-way heading for two seconds crashes") {
    Simulator sim(straight_track(1000, 12));  // wide road so the spin stays on it
    sim.spawn(2);
    for (int i = 0; i < 25; ++i) sim.step(cmd(0, 1));
    // handbrake spin to flip the heading, then coast facing backwards
    for (int i = 0; i < 60 && !sim.episode_over(); ++i) sim.step(cmd(1.0, 0.2, false, true));
    CHECK(std::cos(sim.frame_signal().alpha) < 0);
    StepEvents last;
    int steps = 0;
    while (!sim.episode_over() && steps < 600) {
        last = sim.step(cmd(0, 0));
        ++steps;
    }
    CHECK(last.crash);
    CHECK(last.reason == CrashReason::WrongWay);
}

TEST_CASE("checkpoint crossings are reported once with their index") {
    Simulator sim(straight_track(1000));
    sim.spawn(0);
    std::vector<int> seen;
    for (int i = 0; i < 2500 && !sim.episode_over(); ++i) {
        auto ev = sim.step(cmd(0, 1));
        if (ev.checkpoint) seen.push_back(*ev.checkpoint);
        if (ev.finished) break;
    }
    REQUIRE(seen.size() >= 4);
    CHECK(seen[0] == 1);
    CHECK(seen[1] == 2);
    CHECK(seen[2] == 3);
}

TEST_CASE("reaching the end of the track finishes the episode without a crash") {
    Simulator sim(straight_track(300));
    sim.spawn(sim.track().checkpoint_count() - 1);
    StepEvents last;
    for (int i = 0; i < 2000 && !sim.episode_over(); ++i) last = sim.step(cmd(0, 1));
    CHECK(last.finished);
    CHECK_FALSE(last.crash);
}

TEST_CASE("projection consistency holds every step of a varied run") {
    auto track = std::make_shared<Track>(generate_track(31, 900, 0.6));
    Simulator sim(track);
    sim.spawn(0);
    Rng rng(8);
    for (int i = 0; i < 600; ++i) {
        if (sim.episode_over()) sim.spawn(rng.uniform_int(track->checkpoint_count()));
        sim.step(cmd(rng.uniform(-0.5, 0.5), rng.uniform() < 0.7 ? 1.0 : 0.0));
        CHECK(sim.projection_error() <= 1e-6);
    }
}

TEST_CASE("identical command sequences give bit-identical trajectories") {
    auto track = std::make_shared<Track>(generate_track(13, 700, 0.5));
    auto run = [&] {
        Simulator sim(track);
        sim.spawn(1);
        Rng rng(21);
        std::vector<double> xs;
        for (int i = 0; i < 300 && !sim.episode_over(); ++i) {
            sim.step(cmd(rng.uniform(-0.3, 0.3), 1.0));
            xs.push_back(sim.state().x);
            xs.push_back(sim.state().v);
        }
        return xs;
    };
    CHECK(run() == run());
}

TEST_CASE("rejects invalid commands and double-engaged brakes") {
    Simulator sim(straight_track());
    sim.spawn(0);
    CHECK_THROWS_AS(sim.step(cmd(2.0, 0)), ValueError);
    CHECK_THROWS_AS(sim.step(cmd(0, -0.5)), ValueError);
    CHECK_THROWS_AS(sim.step(ControlCommand{0, 0, true, true}), ValueError);
}
