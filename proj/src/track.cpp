#include "ra3c/track.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ra3c {

Track::Track(std::vector<TrackPoint> points, double checkpoint_spacing, uint64_t seed)
    : points_(std::move(points)), checkpoint_spacing_(checkpoint_spacing), seed_(seed) {
    validate();
    // Checkpoints at multiples of the spacing, keeping a 50 m runway before
    // the finish so a spawn never lands on the final meters. The spacing is
    // shrunk for short tracks so there are always at least two.
    const double usable = length() - 50;
    double c = std::min(checkpoint_spacing_, usable);
    if (c <= 0) throw ValueError("track too short for any checkpoint layout");
    for (double s = 0; s <= usable + 1e-9; s += c) checkpoints_.push_back(s);
    if (checkpoints_.size() < 2) throw ValueError("track must have at least 2 checkpoints");
}

double Track::checkpoint_s(int index) const {
    if (index < 0 || index >= checkpoint_count())
        throw ValueError("checkpoint index " + std::to_string(index) + " out of range");
    return checkpoints_[size_t(index)];
}

void Track::validate() const {
    if (points_.size() < 2) throw ValueError("track needs at least 2 points");
    for (size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!(p.r_w >= 3 && p.r_w <= 12)) throw ValueError("track width out of [3,12] at point " + std::to_string(i));
        if (!(p.mu > 0 && p.mu <= 1)) throw ValueError("track adherence out of (0,1] at point " + std::to_string(i));
        if (std::abs(p.e) > 0.12 + 1e-12) throw ValueError("track superelevation out of range at point " + std::to_string(i));
        if (std::abs(p.kappa) * (0.5 * p.r_w + 2.0) >= 1.0)
            throw ValueError("curvature too high for road width at point " + std::to_string(i));
        if (i > 0) {
            const double ds = p.s - points_[i - 1].s;
            if (ds <= 0) throw ValueError("track arclength must be increasing");
            if (ds > 2.0 + 1e-9) throw ValueError("track point spacing exceeds 2 m");
        }
    }
    if (points_[0].s != 0) throw ValueError("track must start at s = 0");
}

size_t Track::index_at(double s) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), s,
                               [](const TrackPoint& p, double v) { return p.s < v; });
    if (it == points_.end()) return points_.size() - 1;
    return size_t(it - points_.begin());
}

TrackSample Track::sample(double s) const {
    s = clamp(s, 0, length());
    size_t hi = index_at(s);
    if (hi == 0) hi = 1;
    const TrackPoint& a = points_[hi - 1];
    const TrackPoint& b = points_[hi];
    const double seg = b.s - a.s;
    const double t = seg > 0 ? (s - a.s) / seg : 0;
    TrackSample out;
    out.x = a.x + t * (b.x - a.x);
    out.y = a.y + t * (b.y - a.y);
    out.tangent = std::atan2(b.y - a.y, b.x - a.x);
    out.r_w = a.r_w + t * (b.r_w - a.r_w);
    out.kappa = a.kappa + t * (b.kappa - a.kappa);
    out.e = a.e + t * (b.e - a.e);
    out.mu = a.mu + t * (b.mu - a.mu);
    return out;
}

Track::Projection Track::project(double x, double y, double s_hint, double window) const {
    for (;;) {
        const size_t lo = index_at(std::max(0.0, s_hint - window));
        const size_t hi = index_at(std::min(length(), s_hint + window));
        double best_d2 = 1e300;
        size_t best_seg = 0;
        for (size_t i = (lo > 0 ? lo - 1 : 0); i < hi && i + 1 < points_.size(); ++i) {
            const TrackPoint& a = points_[i];
            const TrackPoint& b = points_[i + 1];
            const double ex = b.x - a.x, ey = b.y - a.y;
            const double len2 = ex * ex + ey * ey;
            double t = len2 > 0 ? ((x - a.x) * ex + (y - a.y) * ey) / len2 : 0;
            t = clamp(t, 0, 1);
            const double qx = a.x + t * ex, qy = a.y + t * ey;
            const double dx = x - qx, dy = y - qy;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best_seg = i;
            }
        }
        // Recompute on the winning segment with the parameter left unclamped:
        // the offset is then exactly perpendicular to the segment, so
        // reconstruct() inverts this without corner-wedge error.
        const TrackPoint& a = points_[best_seg];
        const TrackPoint& b = points_[best_seg + 1];
        const double ex = b.x - a.x, ey = b.y - a.y;
        const double len2 = ex * ex + ey * ey;
        const double t = ((x - a.x) * ex + (y - a.y) * ey) / len2;
        const double seg_len = std::sqrt(len2);
        const double tx = ex / seg_len, ty = ey / seg_len;
        const double qx = a.x + t * ex, qy = a.y + t * ey;
        Projection best;
        best.seg = best_seg;
        best.tangent = std::atan2(ey, ex);
        best.s = a.s + t * (b.s - a.s);
        best.d = (x - qx) * ty - (y - qy) * tx;  // right of travel positive

        // If the window was exhausted without covering the whole track and the
        // match sits on its edge, retry with a full scan.
        const bool full = lo == 0 && hi == points_.size() - 1;
        const bool edge = std::abs(best.s - (s_hint - window)) < 2.1 || std::abs(best.s - (s_hint + window)) < 2.1;
        if (full || !edge) return best;
        window = length();
    }
}

std::pair<double, double> Track::reconstruct(const Projection& p) const {
    const TrackPoint& a = points_[p.seg];
    const TrackPoint& b = points_[p.seg + 1];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double seg_len = std::hypot(ex, ey);
    const double tx = ex / seg_len, ty = ey / seg_len;
    const double t = (p.s - a.s) / (b.s - a.s);
    return {a.x + t * ex + p.d * ty, a.y + t * ey - p.d * tx};
}

// --- generation -------------------------------------------------------------

namespace {

struct CurvatureSpan {
    double len;    // m
    double k_from; // linear ramp endpoints
    double k_to;
};

}  // namespace

Track generate_track(uint64_t seed, double length_m, double difficulty, double checkpoint_spacing) {
    if (length_m < 200) throw ValueError("track length must be >= 200 m");
    if (difficulty < 0 || difficulty > 1) throw ValueError("difficulty must be in [0,1]");

    Rng rng(derive_seed(seed, SeedStream::TrackGen));
    const double k_max = difficulty <= 0 ? 1.0 / 220 : 1.0 / 220 + (1.0 / 14 - 1.0 / 220) * difficulty;

    // Piecewise-linear curvature profile: straights and curves joined by
    // clothoid ramps (linear kappa in s).
    std::vector<CurvatureSpan> spans;
    double built = 0;
    double cur_k = 0;
    int sign = rng.uniform() < 0.5 ? -1 : 1;
    const double hairpin_at = length_m * rng.uniform(0.3, 0.45);
    bool hairpin_done = difficulty < 0.95;  // only forced at max difficulty
    while (built < length_m + 60) {
        if (!hairpin_done && built >= hairpin_at) {
            const double k = sign / rng.uniform(13.0, 15.0);
            const double ramp = rng.uniform(14.0, 20.0);
            const double hold = std::abs(kPi * rng.uniform(0.85, 1.0) / k) - ramp;
            spans.push_back({ramp, cur_k, k});
            spans.push_back({std::max(hold, 10.0), k, k});
            spans.push_back({ramp, k, 0.0});
            built += ramp * 2 + std::max(hold, 10.0);
            cur_k = 0;
            sign = -sign;
            hairpin_done = true;
            continue;
        }
        const double straight = rng.uniform(30.0, 150.0) * (1.2 - 0.5 * difficulty);
        spans.push_back({straight, cur_k, 0.0});
        built += straight;
        cur_k = 0;
        // curve: pick magnitude and total heading change
        const double k = sign * rng.uniform(0.25, 1.0) * k_max;
        const double turn = rng.uniform(0.3, 0.9 + 1.8 * difficulty);  // radians
        const double ramp = rng.uniform(12.0, 28.0);
        const double hold = std::max(4.0, std::abs(turn / k) - ramp);
        spans.push_back({ramp, 0.0, k});
        spans.push_back({hold, k, k});
        spans.push_back({ramp, k, 0.0});
        built += ramp * 2 + hold;
        sign = rng.uniform() < 0.65 ? -sign : sign;
    }

    // Width targets drift slowly; adherence gets low-grip zones at higher
    // difficulty.
    const double width_base = rng.uniform(6.5, 9.0) - 2.5 * difficulty;
    std::vector<std::pair<double, double>> width_knots;  // (s, width)
    for (double s = 0; s <= length_m + 300; s += rng.uniform(120.0, 260.0))
        width_knots.emplace_back(s, clamp(width_base + rng.uniform(-1.2, 1.2), 4.0, 10.0));
    std::vector<std::pair<double, double>> mu_knots;
    for (double s = 0; s <= length_m + 300; s += rng.uniform(80.0, 220.0)) {
        double mu = 1.0;
        if (difficulty > 0.3 && rng.uniform() < 0.35 * difficulty)
            mu = rng.uniform(1.0 - 0.7 * difficulty, 1.0);
        mu_knots.emplace_back(s, mu);
    }
    auto interp_knots = [](const std::vector<std::pair<double, double>>& knots, double s) {
        if (s <= knots.front().first) return knots.front().second;
        for (size_t i = 1; i < knots.size(); ++i) {
            if (s <= knots[i].first) {
                const double t = (s - knots[i - 1].first) / (knots[i].first - knots[i - 1].first);
                return knots[i - 1].second + t * (knots[i].second - knots[i - 1].second);
            }
        }
        return knots.back().second;
    };

    auto kappa_at = [&](double s) {
        double off = 0;
        for (const auto& sp : spans) {
            if (s <= off + sp.len) {
                const double t = sp.len > 0 ? (s - off) / sp.len : 0;
                return sp.k_from + t * (sp.k_to - sp.k_from);
            }
            off += sp.len;
        }
        return 0.0;
    };

    // Integrate the centerline with a midpoint step at 2 m resolution.
    const double ds = 2.0;
    std::vector<TrackPoint> pts;
    double x = 0, y = 0, theta = 0;
    for (double s = 0;; s += ds) {
        const double at = std::min(s, length_m);
        TrackPoint p;
        p.s = at;
        p.x = x;
        p.y = y;
        p.kappa = kappa_at(at);
        p.r_w = interp_knots(width_knots, at);
        p.mu = difficulty <= 0 ? 1.0 : clamp(interp_knots(mu_knots, at), 0.25, 1.0);
        p.e = clamp(std::abs(p.kappa) * 20.0, 0.0, 1.0) * 0.12 * (p.kappa >= 0 ? 1.0 : -1.0);
        pts.push_back(p);
        if (at >= length_m) break;
        const double step = std::min(ds, length_m - at);
        const double k_mid = kappa_at(at + 0.5 * step);
        const double theta_mid = theta + 0.5 * step * kappa_at(at);
        x += step * std::cos(theta_mid);
        y += step * std::sin(theta_mid);
        theta += step * k_mid;
    }

    return Track(std::move(pts), checkpoint_spacing, seed);
}

// --- serialization ----------------------------------------------------------

static std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string track_to_string(const Track& track) {
    std::string out = "track-v1 " + fmt_double(track.length()) + " " + fmt_double(track.checkpoint_spacing()) +
                      " " + std::to_string(track.seed()) + "\n";
    for (const auto& p : track.points()) {
        out += fmt_double(p.s);
        out += ' ';
        out += fmt_double(p.x);
        out += ' ';
        out += fmt_double(p.y);
        out += ' ';
        out += fmt_double(p.r_w);
        out += ' ';
        out += fmt_double(p.kappa);
        out += ' ';
        out += fmt_double(p.e);
        out += ' ';
        out += fmt_double(p.mu);
        out += '\n';
    }
    return out;
}

Track track_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string magic;
    double length = 0, spacing = 0;
    uint64_t seed = 0;
    if (!(in >> magic >> length >> spacing >> seed) || magic != "track-v1")
        throw IoError("bad track header (expected 'track-v1 <length> <spacing> <seed>')");
    std::vector<TrackPoint> pts;
    TrackPoint p;
    while (in >> p.s >> p.x >> p.y >> p.r_w >> p.kappa >> p.e >> p.mu) pts.push_back(p);
    if (pts.empty()) throw IoError("track file has no points");
    if (std::abs(pts.back().s - length) > 1e-6) throw IoError("track header length disagrees with points");
    return Track(std::move(pts), spacing, seed);
}

void save_track(const Track& track, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << track_to_string(track);
    if (!f) throw IoError("short write to " + path);
}

Track load_track(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return track_from_string(ss.str());
}

}  // namespace ra3c
