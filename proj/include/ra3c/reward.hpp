#pragma once

#include <span>
#include <string>

#include "ra3c/common.hpp"

namespace ra3c {

enum class RewardKind {
    AngleOnly,  // v*cos(alpha)
    Center,     // v*(cos(alpha) - |d|)
    Margin,     // v*(cos(alpha) - max(|d| - 0.5*r_w, 0))
    Sigmoid,    // v*(cos(alpha) - 1/(1+exp(-4*(|d| - 0.5*r_w))))
};

RewardKind reward_kind_from_string(const std::string& s);
std::string to_string(RewardKind k);

// Per-frame signals the reward functions consume.
struct FrameSignal {
    double v = 0;      // speed, m/s
    double alpha = 0;  // heading minus road tangent, radians, in [-pi, pi]
    double d = 0;      // signed offset from centerline, m (left negative)
    double r_w = 0;    // road width, m (> 0)
};

double compute_reward(RewardKind kind, const FrameSignal& s);

// sum_k gamma^k r_k over a finite sequence; gamma in [0, 1).
double discounted_return(std::span<const double> rewards, double gamma);

}  // namespace ra3c
