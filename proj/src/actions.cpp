#include "ra3c/actions.hpp"

#include <cmath>

namespace ra3c {

ControlCommand class_to_control(int index) {
    if (index < 0 || index >= kActionCount)
        throw ValueError("action class " + std::to_string(index) + " out of range [0,31]");
    ControlCommand cmd;
    if (index <= 26) {
        const int s = index / 3;
        const int g = index % 3;
        cmd.steering = -1.0 + 0.25 * s;
        cmd.gas = 0.5 * g;
    } else if (index <= 30) {
        static const double steer[4] = {-1.0, -0.5, 0.5, 1.0};
        cmd.steering = steer[index - 27];
        cmd.handbrake = true;
    } else {
        cmd.brake = true;
    }
    return cmd;
}

int control_to_class(const ControlCommand& cmd) {
    for (int i = 0; i < kActionCount; ++i)
        if (class_to_control(i) == cmd) return i;
    throw ValueError("control command is not in the 32-class table");
}

std::vector<std::pair<int, ControlCommand>> enumerate_table() {
    std::vector<std::pair<int, ControlCommand>> out;
    out.reserve(kActionCount);
    for (int i = 0; i < kActionCount; ++i) out.emplace_back(i, class_to_control(i));
    return out;
}

int sample_action(std::span<const float> policy, Rng& rng) {
    double total = 0;
    for (float p : policy) {
        if (!(p >= 0) || !std::isfinite(double(p))) throw ValueError("sample_action: invalid probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-4)
        throw ValueError("sample_action: probabilities sum to " + std::to_string(total));
    const double u = rng.uniform() * total;
    double acc = 0;
    for (size_t i = 0; i < policy.size(); ++i) {
        acc += policy[i];
        if (u < acc) return int(i);
    }
    return int(policy.size()) - 1;
}

}  // namespace ra3c
