#pragma once

#include <memory>
#include <optional>

#include "ra3c/actions.hpp"
#include "ra3c/reward.hpp"
#include "ra3c/track.hpp"

namespace ra3c {

struct CarState {
    double x = 0, y = 0;
    double heading = 0;   // radians
    double v = 0;         // longitudinal speed, m/s, >= 0
    double slip = 0;      // lateral velocity, m/s, positive to the left
    double s = 0;         // progress along the centerline, m
    double d = 0;         // signed lateral offset, m, right positive
};

enum class CrashReason { None, Stalled, WrongWay, OffRoad };

std::string to_string(CrashReason r);

struct StepEvents {
    bool hit = false;
    bool crash = false;
    CrashReason reason = CrashReason::None;
    std::optional<int> checkpoint;  // index passed this step, if any
    bool finished = false;          // reached the end of the track (terminal, not a crash)

    bool terminal() const { return crash || finished; }
};

// Physics and episode constants. These are calibration choices, not track
// data; the jitter knob perturbs them +-2% per episode when enabled.
struct SimConfig {
    double dt = 1.0 / 30;
    double accel = 6.0;            // full-gas engine acceleration, m/s^2
    double drag_lin = 0.06;        // 1/s
    double drag_quad = 0.0015;     // 1/m
    double brake_decel = 12.0;     // m/s^2
    double steer_max_rad = 35.0 * kPi / 180.0;
    double wheelbase = 2.6;        // m
    double handbrake_grip = 0.35;  // rear adherence factor while handbraking
    double superelev_gain = 1.0;
    double v_max = 55.0;           // m/s
    double slip_recovery = 3.0;    // 1/s, scaled by adherence
    double slip_recovery_hb = 0.8; // 1/s while handbraking (sustained drift)
    double slip_scrub = 0.35;      // speed loss per unit slip, 1/s
    double yaw_overhang = 1.3;     // how far heading may outrun path grip
    double yaw_max_hb = 2.5;       // rad/s cap while handbraking
    double breach_speed = 10.0;    // lateral m/s that carries the car through the rail
    double hit_speed_scale = 0.6;
    double offroad_margin = 3.0;   // m beyond the rail before an off-road crash
    double offroad_drag = 4.0;     // m/s^2
    double offroad_grip = 0.4;     // adherence multiplier off the road
    double stall_window_s = 5.0;
    double stall_min_progress = 1.0;  // m
    double wrongway_window_s = 2.0;
    double finish_margin = 0.5;    // m before track end that counts as finished
    bool jitter = false;           // per-episode physics/palette jitter
};

// Deterministic 2D rally environment over one Track. Strict lockstep: after a
// terminal step the episode is over and step() throws until the next spawn.
class Simulator {
public:
    Simulator(std::shared_ptr<const Track> track, SimConfig config = {});

    // Places the car on the centerline at the checkpoint, heading along the
    // road tangent, at rest.
    void spawn(int checkpoint_index, uint64_t episode_seed = 0);

    StepEvents step(const ControlCommand& cmd);

    FrameSignal frame_signal() const;
    const CarState& state() const { return state_; }
    const Track& track() const { return *track_; }
    const SimConfig& config() const { return config_; }
    bool episode_over() const { return terminal_; }
    int episode_steps() const { return age_; }
    double progress_fraction() const { return clamp(state_.s / track_->length(), 0.0, 1.0); }
    uint64_t episode_seed() const { return episode_seed_; }

    // Verifies the stored pose against the projection-derived one (testing
    // hook for the consistency invariant).
    double projection_error() const;

private:
    enum class Contact { Free, OnRail, OffRoad };

    std::shared_ptr<const Track> track_;
    SimConfig config_;       // as configured
    SimConfig live_;         // per-episode effective constants (jitter applied)
    CarState state_;
    Track::Projection proj_;
    Contact contact_ = Contact::Free;
    bool terminal_ = true;  // must spawn before stepping
    int age_ = 0;
    int wrongway_steps_ = 0;
    std::vector<double> s_history_;  // ring buffer for the stall check
    uint64_t episode_seed_ = 0;
};

}  // namespace ra3c
