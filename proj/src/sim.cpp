#include "ra3c/sim.hpp"

#include <cmath>

namespace ra3c {

namespace {
constexpr double kGravity = 9.81;
}

std::string to_string(CrashReason r) {
    switch (r) {
        case CrashReason::None: return "none";
        case CrashReason::Stalled: return "stalled";
        case CrashReason::WrongWay: return "wrong_way";
        case CrashReason::OffRoad: return "off_road";
    }
    return "?";
}

Simulator::Simulator(std::shared_ptr<const Track> track, SimConfig config)
    : track_(std::move(track)), config_(config), live_(config) {
    if (!track_) throw ValueError("simulator needs a track");
    if (!(config_.dt > 0)) throw ValueError("dt must be positive");
}

void Simulator::spawn(int checkpoint_index, uint64_t episode_seed) {
    const double s = track_->checkpoint_s(checkpoint_index);  // validates index
    episode_seed_ = episode_seed;
    live_ = config_;
    if (config_.jitter) {
        Rng jr(derive_seed(episode_seed, SeedStream::PhysicsJitter));
        auto j = [&] { return 1.0 + 0.02 * (2.0 * jr.uniform() - 1.0); };
        live_.accel *= j();
        live_.drag_lin *= j();
        live_.brake_decel *= j();
        live_.handbrake_grip *= j();
        live_.slip_recovery *= j();
    }
    const TrackSample at = track_->sample(s);
    state_ = CarState{};
    state_.x = at.x;
    state_.y = at.y;
    state_.heading = at.tangent;
    state_.s = s;
    state_.d = 0;
    proj_ = track_->project(state_.x, state_.y, s);
    contact_ = Contact::Free;
    terminal_ = false;
    age_ = 0;
    wrongway_steps_ = 0;
    s_history_.assign(1, s);
}

StepEvents Simulator::step(const ControlCommand& cmd) {
    if (terminal_) throw Error("episode is over; spawn before stepping");
    if (!std::isfinite(state_.x) || !std::isfinite(state_.y) || !std::isfinite(state_.v) ||
        !std::isfinite(state_.heading) || !std::isfinite(state_.slip))
        throw ValueError("non-finite car state");
    if (cmd.brake && cmd.handbrake) throw ValueError("brake and handbrake cannot both be engaged");
    if (cmd.steering < -1 || cmd.steering > 1 || cmd.gas < 0 || cmd.gas > 1)
        throw ValueError("control command out of range");

    const SimConfig& k = live_;
    const double dt = k.dt;
    const TrackSample road = track_->sample(state_.s);
    const bool off_road = contact_ == Contact::OffRoad;
    const double mu = off_road ? road.mu * k.offroad_grip : road.mu;

    // Longitudinal: engine minus drag, brake and slip scrub.
    double a = k.accel * cmd.gas - k.drag_lin * state_.v - k.drag_quad * state_.v * state_.v;
    if (state_.v > 0) {
        if (cmd.brake) a -= k.brake_decel;
        if (off_road) a -= k.offroad_drag;
    }
    a -= k.slip_scrub * std::abs(state_.slip);
    double v_new = clamp(state_.v + a * dt, 0.0, k.v_max);
    const double v_mid = 0.5 * (state_.v + v_new);

    // Lateral: kinematic yaw demand against the adherence-scaled friction
    // circle, with a superelevation bonus when banked into the turn.
    const double delta = k.steer_max_rad * cmd.steering;
    const double yaw_cmd = v_mid * std::tan(delta) / k.wheelbase;
    const double a_demand = v_mid * yaw_cmd;
    double a_limit = mu * kGravity * (1.0 + k.superelev_gain * road.e * (a_demand >= 0 ? 1.0 : -1.0));
    a_limit = std::max(a_limit, 0.3 * mu * kGravity);
    const double grip = cmd.handbrake ? a_limit * k.handbrake_grip : a_limit;
    const double a_lat = clamp(a_demand, -grip, grip);

    double yaw;
    if (cmd.handbrake) {
        // Rear grip released: heading follows the steering command (drift),
        // the path only bends as far as the remaining grip allows.
        yaw = clamp(yaw_cmd, -k.yaw_max_hb, k.yaw_max_hb);
    } else {
        const double yaw_cap = k.yaw_overhang * a_limit / std::max(v_mid, 1.0);
        yaw = clamp(yaw_cmd, -yaw_cap, yaw_cap);
    }

    // Heading outrunning the path feeds lateral slip; grip bleeds it away.
    const double slip_gain = -(v_mid * yaw - a_lat);
    const double recovery = cmd.handbrake ? k.slip_recovery_hb : k.slip_recovery * mu;
    double slip_new = state_.slip + slip_gain * dt - recovery * state_.slip * dt;

    // Redirected momentum cannot add energy: with no throttle the (v, slip)
    // energy is clamped to its pre-step value.
    if (cmd.gas <= 0) {
        const double ke_old = state_.v * state_.v + state_.slip * state_.slip;
        const double ke_new = v_new * v_new + slip_new * slip_new;
        if (ke_new > ke_old) {
            const double scale = std::sqrt(ke_old / std::max(ke_new, 1e-12));
            v_new *= scale;
            slip_new *= scale;
        }
    }

    const double heading_new = wrap_angle(state_.heading + yaw * dt);
    const double cos_h = std::cos(state_.heading), sin_h = std::sin(state_.heading);
    double x_new = state_.x + (v_new * cos_h - slip_new * sin_h) * dt;
    double y_new = state_.y + (v_new * sin_h + slip_new * cos_h) * dt;

    const double s_prev = state_.s;
    Track::Projection proj = track_->project(x_new, y_new, s_prev);

    StepEvents ev;

    // Rail contact / off-road transitions.
    const double half_new = 0.5 * track_->sample(proj.s).r_w;
    const double abs_d = std::abs(proj.d);
    if (abs_d <= half_new) {
        contact_ = Contact::Free;
    } else if (contact_ == Contact::Free) {
        const double impact = (abs_d - std::abs(state_.d)) / dt;
        if (impact <= k.breach_speed) {
            // clamped to the guardrail
            ev.hit = true;
            proj.d = (proj.d >= 0 ? half_new : -half_new);
            auto [rx, ry] = track_->reconstruct(proj);
            x_new = rx;
            y_new = ry;
            slip_new = 0;
            v_new *= k.hit_speed_scale;
            contact_ = Contact::OnRail;
        } else {
            contact_ = Contact::OffRoad;  // breached the rail
        }
    } else if (contact_ == Contact::OnRail) {
        // still pressing against the rail: hold the clamp, no new hit
        proj.d = (proj.d >= 0 ? half_new : -half_new);
        auto [rx, ry] = track_->reconstruct(proj);
        x_new = rx;
        y_new = ry;
        slip_new = 0;
    }

    state_.x = x_new;
    state_.y = y_new;
    state_.heading = heading_new;
    state_.v = v_new;
    state_.slip = slip_new;
    state_.s = proj.s;
    state_.d = proj.d;
    proj_ = proj;
    age_ += 1;

    // Checkpoint crossing (spacing is far larger than one step's travel).
    for (int c = 1; c < track_->checkpoint_count(); ++c) {
        const double cs = track_->checkpoint_s(c);
        if (s_prev < cs && state_.s >= cs) {
            ev.checkpoint = c;
            break;
        }
    }

    // Terminal conditions.
    const double alpha = wrap_angle(state_.heading - proj.tangent);
    if (std::cos(alpha) < 0)
        wrongway_steps_ += 1;
    else
        wrongway_steps_ = 0;

    s_history_.push_back(state_.s);
    const int stall_steps = int(k.stall_window_s / dt + 0.5);

    if (contact_ == Contact::OffRoad && std::abs(state_.d) > half_new + k.offroad_margin) {
        ev.crash = true;
        ev.reason = CrashReason::OffRoad;
    } else if (wrongway_steps_ >= int(k.wrongway_window_s / dt + 0.5)) {
        ev.crash = true;
        ev.reason = CrashReason::WrongWay;
    } else if (int(s_history_.size()) > stall_steps &&
               state_.s - s_history_[s_history_.size() - 1 - size_t(stall_steps)] < k.stall_min_progress) {
        ev.crash = true;
        ev.reason = CrashReason::Stalled;
    } else if (state_.s >= track_->length() - k.finish_margin) {
        ev.finished = true;
    }

    if (ev.terminal()) terminal_ = true;
    return ev;
}

FrameSignal Simulator::frame_signal() const {
    FrameSignal sig;
    sig.v = state_.v;
    sig.alpha = wrap_angle(state_.heading - proj_.tangent);
    sig.d = state_.d;
    sig.r_w = track_->sample(state_.s).r_w;
    return sig;
}

double Simulator::projection_error() const {
    auto [rx, ry] = track_->reconstruct(proj_);
    return std::hypot(rx - state_.x, ry - state_.y);
}

}  // namespace ra3c
