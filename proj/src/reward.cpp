#include "ra3c/reward.hpp"

#include <cmath>

namespace ra3c {

RewardKind reward_kind_from_string(const std::string& s) {
    if (s == "angle_only") return RewardKind::AngleOnly;
    if (s == "center") return RewardKind::Center;
    if (s == "margin") return RewardKind::Margin;
    if (s == "sigmoid") return RewardKind::Sigmoid;
    throw ValueError("unknown reward kind '" + s + "' (expected center|angle_only|margin|sigmoid)");
}

std::string to_string(RewardKind k) {
    switch (k) {
        case RewardKind::AngleOnly: return "angle_only";
        case RewardKind::Center: return "center";
        case RewardKind::Margin: return "margin";
        case RewardKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

double compute_reward(RewardKind kind, const FrameSignal& s) {
    if (!(s.r_w > 0) || !std::isfinite(s.v) || !std::isfinite(s.d) || !std::isfinite(s.alpha) ||
        s.alpha < -kPi || s.alpha > kPi)
        throw ValueError("compute_reward: frame signal violates invariants");
    const double ad = std::abs(s.d);
    switch (kind) {
        case RewardKind::AngleOnly:
            return s.v * std::cos(s.alpha);
        case RewardKind::Center:
            return s.v * (std::cos(s.alpha) - ad);
        case RewardKind::Margin:
            return s.v * (std::cos(s.alpha) - std::max(ad - 0.5 * s.r_w, 0.0));
        case RewardKind::Sigmoid:
            return s.v * (std::cos(s.alpha) - 1.0 / (1.0 + std::exp(-4.0 * (ad - 0.5 * s.r_w))));
    }
    throw ValueError("compute_reward: bad kind");
}

double discounted_return(std::span<const double> rewards, double gamma) {
    if (!(gamma >= 0.0) || gamma >= 1.0) throw ValueError("discounted_return: gamma must be in [0,1)");
    double acc = 0;
    for (size_t i = rewards.size(); i-- > 0;) acc = rewards[i] + gamma * acc;
    return acc;
}

}  // namespace ra3c
