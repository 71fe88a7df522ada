#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ra3c/sim.hpp"
#include "ra3c/tensor.hpp"

namespace ra3c {

// Pixel classes produced alongside the RGB frame.
enum : uint8_t { PX_SKY = 0, PX_GROUND = 1, PX_ROAD = 2, PX_RAIL = 3 };

using Rgb = std::array<uint8_t, 3>;

// Flat-color scheme derived from the track seed (seasons/locations stand-in).
// Rails are always the brightest element and roads the darkest so the scene
// keeps a stable contrast ordering across palettes.
struct Palette {
    Rgb sky{130, 170, 220};
    Rgb ground{90, 140, 70};
    Rgb road{55, 55, 60};
    Rgb rail{245, 245, 245};

    static Palette for_track(const Track& track, uint64_t episode_jitter_seed = 0);
};

struct RenderConfig {
    int width = 84;
    int height = 84;
    double cam_height = 1.3;      // m above the road
    double cam_pitch = -0.10;     // radians, negative looks down
    double hfov = 1.2;            // radians
    double draw_distance = 150;   // m
};

// Perspective ground-plane render from the car pose. Writes H*W*3 interleaved
// RGB (row-major, top row first) and/or a per-pixel class mask.
void render_scene(const CarState& car, const Track& track, const RenderConfig& cfg, const Palette& palette,
                  uint8_t* rgb_out, uint8_t* mask_out);

std::vector<uint8_t> render_frame_rgb(const Simulator& sim, const RenderConfig& cfg);
std::vector<uint8_t> render_class_mask(const Simulator& sim, const RenderConfig& cfg);

// [3,H,W] planar float tensor in [0,1] from an interleaved u8 frame.
template <typename T>
TensorT<T> frame_to_tensor(const std::vector<uint8_t>& rgb, int h, int w) {
    if (rgb.size() != size_t(h) * w * 3) throw ShapeError("frame byte count does not match dimensions");
    TensorT<T> t({3, h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                t.data[(size_t(c) * h + y) * w + x] = T(rgb[(size_t(y) * w + x) * 3 + size_t(c)]) / T(255);
    return t;
}

// What the policy consumes each step, plus the metadata the learner needs to
// compute rewards on its side of the wire.
struct Observation {
    int h = 0, w = 0;
    std::vector<uint8_t> frame_rgb;  // H*W*3 interleaved
    double speed = 0;                // m/s
    int prev_action = -1;            // -1 at episode start
    FrameSignal signal;
    double progress = 0;  // s / track length in [0,1]
};

Observation observe(const Simulator& sim, const RenderConfig& cfg, int prev_action);

// Portable PPM (P6) dump, handy for saliency/debug output.
void write_ppm(const std::string& path, const std::vector<uint8_t>& rgb, int h, int w);

}  // namespace ra3c
