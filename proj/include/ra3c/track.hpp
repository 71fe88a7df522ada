#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ra3c/common.hpp"

namespace ra3c {

struct TrackPoint {
    double s = 0;      // arclength, m
    double x = 0, y = 0;
    double r_w = 6;    // road width, m, in [3,12]
    double kappa = 0;  // signed curvature, 1/m
    double e = 0;      // superelevation rate, |e| <= 0.12, sign matches kappa
    double mu = 1;     // adherence in (0,1]
};

// Interpolated query result along the centerline.
struct TrackSample {
    double x = 0, y = 0;
    double tangent = 0;  // road tangent angle, radians
    double r_w = 6;
    double kappa = 0;
    double e = 0;
    double mu = 1;
};

class Track {
public:
    Track() = default;
    Track(std::vector<TrackPoint> points, double checkpoint_spacing, uint64_t seed);

    double length() const { return points_.empty() ? 0 : points_.back().s; }
    double checkpoint_spacing() const { return checkpoint_spacing_; }
    uint64_t seed() const { return seed_; }
    const std::vector<TrackPoint>& points() const { return points_; }

    int checkpoint_count() const { return int(checkpoints_.size()); }
    double checkpoint_s(int index) const;

    TrackSample sample(double s) const;

    // Nearest-point projection of (x, y) onto the centerline, searched within
    // +-window meters of s_hint. Returns (s, d); d is positive to the right of
    // the direction of travel (left of the road is negative). The winning
    // segment index and its tangent are reported so reconstruct() can invert
    // the projection exactly, including at segment joints.
    struct Projection {
        double s = 0;
        double d = 0;
        size_t seg = 0;      // index of the segment's first point
        double tangent = 0;  // tangent angle of that segment
    };
    Projection project(double x, double y, double s_hint, double window = 40) const;

    // (x, y) = centerline(s along seg) + d * right-normal(seg).
    std::pair<double, double> reconstruct(const Projection& p) const;

    // Index of the first point with s >= the given arclength (clamped).
    size_t index_at(double s) const;

    void validate() const;

private:
    std::vector<TrackPoint> points_;
    std::vector<double> checkpoints_;
    double checkpoint_spacing_ = 200;
    uint64_t seed_ = 0;
};

// Deterministic procedural track: clothoid-style curvature ramps, difficulty
// scales peak curvature, adherence drops and width. Difficulty 0 keeps
// |kappa| <= 1/200 and mu == 1 everywhere; difficulty >= 0.95 guarantees at
// least one hairpin with |kappa| >= 1/15.
Track generate_track(uint64_t seed, double length_m, double difficulty, double checkpoint_spacing = 200);

// Text format, one point per line: "s x y r_w kappa e mu" after a
// "track-v1 <length> <checkpoint_spacing> <seed>" header. Floats are written
// shortest-round-trip so save/load is bit-exact.
void save_track(const Track& track, const std::string& path);
Track load_track(const std::string& path);
std::string track_to_string(const Track& track);
Track track_from_string(const std::string& text);

}  // namespace ra3c
