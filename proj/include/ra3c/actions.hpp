#pragma once

#include <span>
#include <vector>

#include "ra3c/common.hpp"

namespace ra3c {

constexpr int kActionCount = 32;

struct ControlCommand {
    double steering = 0;  // [-1, 1]
    double gas = 0;       // [0, 1]
    bool brake = false;
    bool handbrake = false;

    bool operator==(const ControlCommand&) const = default;
};

// The 32 discrete control classes. Layout (frozen; checkpoints depend on it):
//   0..26  driving: index = 3*s + g, steering = -1 + 0.25*s (s in 0..8),
//          gas in {0, 0.5, 1} (g in 0..2)
//   27..30 handbrake turns: steering in {-1, -0.5, 0.5, 1}, gas 0
//   31     full brake, steering 0
ControlCommand class_to_control(int index);

// Reverse lookup; throws if the command is not one of the 32 table entries.
int control_to_class(const ControlCommand& cmd);

std::vector<std::pair<int, ControlCommand>> enumerate_table();

// Inverse-CDF sample from a probability vector. Rejects vectors that do not
// sum to 1 within 1e-4.
int sample_action(std::span<const float> policy, Rng& rng);

}  // namespace ra3c
