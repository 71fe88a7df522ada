#pragma once

#include <limits>

#include "ra3c/trainer.hpp"

namespace ra3c {

constexpr double kSegmentMeters = 5.0;

// Trailing-window mean and population standard deviation per index; prefixes
// shorter than the window use the samples available.
std::pair<std::vector<double>, std::vector<double>> rolling(std::span<const double> series, int window);

double hits_per_km(std::span<const EpisodeRecord> episodes);

// Percentage of the track's 5 m segments any episode ever reached.
double exploration_pct(std::span<const EpisodeRecord> episodes, const Track& track);

// Per-5m-segment visit and crash counts.
struct SegmentHistogram {
    std::vector<long> visits;
    std::vector<long> crashes;

    static SegmentHistogram build(std::span<const EpisodeRecord> episodes, const Track& track);
    long total_crashes() const;
};

// Standards-style horizontal-curve design speed in km/h:
// straight -> cap, else sqrt(127 * R * (e + f)) clamped to the cap.
double design_speed(const TrackPoint& point, double friction = 0.15, double cap_kmh = 130);
double design_speed(const TrackSample& at, double friction = 0.15, double cap_kmh = 130);

struct EvalOptions {
    int episodes = 10;
    uint64_t seed = 1;
    double cap_kmh = std::numeric_limits<double>::infinity();
    bool design_speed_cap = false;  // per-segment design speed instead of a flat cap
    double design_friction = 0.15;
    double design_cap_kmh = 130;
    int episode_step_cap = 9000;
    bool spawn_random = true;  // else always checkpoint 0
};

struct EvalResult {
    double crashes_per_km = 0;
    double hits_per_km = 0;
    double mean_speed_kmh = 0;
    double distance_km = 0;
    long crashes = 0;
    long hits = 0;
    long steps = 0;
    int episodes = 0;
    std::vector<EpisodeRecord> records;
};

// Runs evaluation episodes with the gas cut above the cap (and the brake
// forced >10% above it); the policy is sampled with per-episode seeds.
EvalResult speed_limited_eval(const PolicyNet& net, std::shared_ptr<const Track> track, const EvalOptions& opts,
                              const SimConfig& sim_cfg = {});

}  // namespace ra3c
