#include "ra3c/render.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

namespace ra3c {

Palette Palette::for_track(const Track& track, uint64_t episode_jitter_seed) {
    Rng rng(derive_seed(track.seed(), SeedStream::Palette));
    Palette p;
    // Snowy look when the track has low-adherence zones.
    double min_mu = 1;
    for (const auto& pt : track.points()) min_mu = std::min(min_mu, pt.mu);

    auto pick = [&](int lo, int hi) { return uint8_t(lo + rng.uniform_int(hi - lo + 1)); };
    const uint8_t sky_base = pick(120, 200);
    p.sky = {uint8_t(sky_base - 20), uint8_t(sky_base), uint8_t(std::min(255, sky_base + 40))};
    if (min_mu < 0.6) {
        p.ground = {pick(215, 240), pick(220, 245), pick(225, 250)};
    } else {
        const uint8_t g = pick(110, 165);
        p.ground = {uint8_t(g - pick(20, 50)), g, pick(50, 90)};
    }
    const uint8_t r = pick(40, 75);
    p.road = {r, r, uint8_t(r + 5)};
    p.rail = {pick(235, 255), pick(235, 255), pick(235, 255)};

    if (episode_jitter_seed != 0) {
        Rng jr(derive_seed(episode_jitter_seed, SeedStream::Palette));
        auto jit = [&](Rgb& c) {
            const int dv = jr.uniform_int(17) - 8;
            for (auto& ch : c) ch = uint8_t(clamp(int(ch) + dv, 0, 255));
        };
        jit(p.sky);
        jit(p.ground);
        jit(p.road);
    }
    return p;
}

void render_scene(const CarState& car, const Track& track, const RenderConfig& cfg, const Palette& palette,
                  uint8_t* rgb_out, uint8_t* mask_out) {
    const int W = cfg.width, H = cfg.height;
    const double tan_h = std::tan(0.5 * cfg.hfov);
    const double tan_v = tan_h * double(H) / double(W);
    const double cos_p = std::cos(cfg.cam_pitch), sin_p = std::sin(cfg.cam_pitch);
    const double cos_t = std::cos(car.heading), sin_t = std::sin(car.heading);

    const auto& pts = track.points();

    auto put = [&](int y, int x, const Rgb& c, uint8_t cls) {
        const size_t i = (size_t(y) * W + x);
        if (rgb_out) {
            rgb_out[i * 3 + 0] = c[0];
            rgb_out[i * 3 + 1] = c[1];
            rgb_out[i * 3 + 2] = c[2];
        }
        if (mask_out) mask_out[i] = cls;
    };

    for (int row = 0; row < H; ++row) {
        // Vertical ray component for this row (top row looks up the most).
        const double ndc_v = double(H - 1 - 2 * row) * (tan_v / H);
        const double dz = ndc_v * cos_p + sin_p;
        const double fwd = cos_p - ndc_v * sin_p;
        const double ground_t = dz < -1e-6 ? cfg.cam_height / -dz : -1;
        const double x_f = ground_t > 0 ? ground_t * fwd : -1;
        if (x_f <= 0 || x_f > cfg.draw_distance) {
            const bool sky = x_f <= 0;
            for (int col = 0; col < W; ++col)
                put(row, col, sky ? palette.sky : palette.ground, sky ? PX_SKY : PX_GROUND);
            continue;
        }

        // Candidate centerline window for this row's ground ring.
        const double s_center = car.s + x_f;
        const double s_span = 18.0 + 0.6 * x_f;
        size_t lo = track.index_at(std::max(0.0, s_center - s_span));
        size_t hi = track.index_at(std::min(track.length(), s_center + s_span));
        if (lo > 0) --lo;
        if (hi >= pts.size() - 1) hi = pts.size() - 2;

        for (int col = 0; col < W; ++col) {
            // integer offset keeps left/right rays exact mirror images
            const double ndc_h = double(2 * col - (W - 1)) * (tan_h / W);
            const double y_l = -ground_t * ndc_h;  // left positive
            const double px = car.x + x_f * cos_t - y_l * sin_t;
            const double py = car.y + x_f * sin_t + y_l * cos_t;

            double best_d2 = 1e300;
            size_t best = lo;
            double best_tc = 0;
            for (size_t i = lo; i <= hi; ++i) {
                const double ex = pts[i + 1].x - pts[i].x, ey = pts[i + 1].y - pts[i].y;
                const double len2 = ex * ex + ey * ey;
                double t = ((px - pts[i].x) * ex + (py - pts[i].y) * ey) / len2;
                t = clamp(t, 0, 1);
                const double qx = pts[i].x + t * ex - px, qy = pts[i].y + t * ey - py;
                const double d2 = qx * qx + qy * qy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = i;
                    best_tc = t;
                }
            }
            const double dist = std::sqrt(best_d2);
            const double half = 0.5 * (pts[best].r_w + best_tc * (pts[best + 1].r_w - pts[best].r_w));
            if (dist <= half)
                put(row, col, palette.road, PX_ROAD);
            else if (dist <= half + 0.4)
                put(row, col, palette.rail, PX_RAIL);
            else
                put(row, col, palette.ground, PX_GROUND);
        }
    }
}

std::vector<uint8_t> render_frame_rgb(const Simulator& sim, const RenderConfig& cfg) {
    std::vector<uint8_t> rgb(size_t(cfg.width) * cfg.height * 3);
    const Palette pal = Palette::for_track(sim.track(), sim.config().jitter ? sim.episode_seed() : 0);
    render_scene(sim.state(), sim.track(), cfg, pal, rgb.data(), nullptr);
    return rgb;
}

std::vector<uint8_t> render_class_mask(const Simulator& sim, const RenderConfig& cfg) {
    std::vector<uint8_t> mask(size_t(cfg.width) * cfg.height);
    const Palette pal = Palette::for_track(sim.track(), 0);
    render_scene(sim.state(), sim.track(), cfg, pal, nullptr, mask.data());
    return mask;
}

Observation observe(const Simulator& sim, const RenderConfig& cfg, int prev_action) {
    Observation obs;
    obs.h = cfg.height;
    obs.w = cfg.width;
    obs.frame_rgb = render_frame_rgb(sim, cfg);
    obs.speed = sim.state().v;
    obs.prev_action = prev_action;
    obs.signal = sim.frame_signal();
    obs.progress = sim.progress_fraction();
    return obs;
}

void write_ppm(const std::string& path, const std::vector<uint8_t>& rgb, int h, int w) {
    if (rgb.size() != size_t(h) * w * 3) throw ShapeError("ppm: byte count does not match dimensions");
    std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!f) throw IoError("cannot open " + path + " for writing");
    std::fprintf(f.get(), "P6\n%d %d\n255\n", w, h);
    if (std::fwrite(rgb.data(), 1, rgb.size(), f.get()) != rgb.size()) throw IoError("short write to " + path);
}

}  // namespace ra3c
