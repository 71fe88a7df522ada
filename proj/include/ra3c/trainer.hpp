#pragma once

#include <atomic>
#include <functional>

#include "ra3c/net.hpp"
#include "ra3c/services.hpp"

namespace ra3c {

enum class RespawnStrategy { Start, RandomCheckpoint };

RespawnStrategy respawn_from_string(const std::string& s);
std::string to_string(RespawnStrategy r);

struct TrainerConfig {
    double gamma = 0.99;
    int t_max = 5;
    double entropy_coef = 0.01;  // beta; discrete A3C collapses without it
    double value_coef = 0.5;
    double grad_clip = 40;
    RespawnStrategy respawn = RespawnStrategy::RandomCheckpoint;
    RewardKind reward = RewardKind::Center;
    double reward_scale = 1.0 / 30;  // per-step reward ~ meters gained when centered
    long max_steps = 100000;         // global env-step budget
    int episode_step_cap = 9000;     // 5 simulated minutes at 30 Hz
    NetConfig net = NetConfig::for_variant(EncoderVariant::Ours);
    uint64_t seed = 1;

    void validate() const;
};

struct Transition {
    int action = 0;
    double reward = 0;
    double value = 0;       // critic estimate at the acted state
    double probability = 0; // pi(a_t | s_t) at act time
    bool terminal = false;
};

struct RolloutBatch {
    std::vector<Transition> steps;
    double bootstrap_value = 0;  // 0 when the last step is terminal
};

// Backward recursion R <- r + gamma*R seeded with the bootstrap value.
std::vector<double> n_step_targets(const RolloutBatch& batch, double gamma);

// Sum over steps of: -log pi(a_t)*advantage - beta*entropy + c*(V - target)^2,
// with the advantage held constant (no gradient through it).
template <typename T>
typename TapeT<T>::Id build_a3c_loss(TapeT<T>& tape, const std::vector<typename PolicyNetT<T>::StepIds>& steps,
                                     std::span<const int> actions, std::span<const double> targets,
                                     std::span<const double> advantages, double entropy_coef, double value_coef);

int respawn_choice(RespawnStrategy strategy, int checkpoint_count, Rng& rng);

// One row of the episode CSV plus the segment interval used by the
// exploration metrics (not serialized into the pinned columns).
struct EpisodeRecord {
    int worker = 0;
    long episode = 0;
    int start_checkpoint = 0;
    long steps = 0;
    double distance_m = 0;
    double mean_speed_kmh = 0;
    int hits = 0;
    std::string crash_reason = "none";
    double min_s = 0, max_s = 0, end_s = 0;
};

std::string episode_csv_header();
std::string episode_csv_row(const EpisodeRecord& r);
std::vector<EpisodeRecord> parse_episode_csv(const std::string& text, double checkpoint_spacing);

// Global env-step budget shared by all workers of a run.
class StepBudget {
public:
    explicit StepBudget(long total) : remaining_(total) {}
    bool take() {
        if (remaining_.fetch_sub(1, std::memory_order_relaxed) > 0) return true;
        remaining_.fetch_add(1, std::memory_order_relaxed);
        return false;
    }
    long remaining() const { return std::max(long(0), remaining_.load(std::memory_order_relaxed)); }

private:
    std::atomic<long> remaining_;
};

using RecordSink = std::function<void(const EpisodeRecord&)>;

// The A3C actor-learner loop: sync weights, roll out up to t_max steps,
// push clipped gradients, respawn on terminal events per the strategy.
void worker_loop(int worker_id, int track_index, EnvClient& env, ParamClient& params, const TrainerConfig& cfg,
                 StepBudget& budget, const RecordSink& sink);

}  // namespace ra3c
