#include "ra3c/trainer.hpp"

#include <cmath>
#include <sstream>

namespace ra3c {

RespawnStrategy respawn_from_string(const std::string& s) {
    if (s == "start") return RespawnStrategy::Start;
    if (s == "random_checkpoint") return RespawnStrategy::RandomCheckpoint;
    throw ValueError("unknown respawn strategy '" + s + "' (expected start|random_checkpoint)");
}

std::string to_string(RespawnStrategy r) {
    return r == RespawnStrategy::Start ? "start" : "random_checkpoint";
}

void TrainerConfig::validate() const {
    if (!(gamma >= 0) || gamma >= 1) throw ValueError("gamma must be in [0,1)");
    if (t_max < 1) throw ValueError("t_max must be >= 1");
    if (entropy_coef < 0 || value_coef < 0) throw ValueError("loss coefficients must be non-negative");
    if (max_steps < 0) throw ValueError("max_steps must be >= 0");
    if (episode_step_cap < 1) throw ValueError("episode_step_cap must be >= 1");
    if (reward_scale <= 0) throw ValueError("reward_scale must be positive");
    net.validate();
}

std::vector<double> n_step_targets(const RolloutBatch& batch, double gamma) {
    if (batch.steps.empty()) throw ValueError("n_step_targets: empty batch");
    if (!(gamma >= 0) || gamma >= 1) throw ValueError("n_step_targets: gamma must be in [0,1)");
    if (batch.steps.back().terminal && batch.bootstrap_value != 0)
        throw ValueError("n_step_targets: bootstrap must be zero after a terminal step");
    std::vector<double> targets(batch.steps.size());
    double acc = batch.bootstrap_value;
    for (size_t i = batch.steps.size(); i-- > 0;) {
        acc = batch.steps[i].reward + gamma * acc;
        targets[i] = acc;
    }
    return targets;
}

int respawn_choice(RespawnStrategy strategy, int checkpoint_count, Rng& rng) {
    if (checkpoint_count < 1) throw ValueError("respawn_choice: no checkpoints");
    if (strategy == RespawnStrategy::Start) return 0;
    return rng.uniform_int(checkpoint_count);
}

template <typename T>
typename TapeT<T>::Id build_a3c_loss(TapeT<T>& tape, const std::vector<typename PolicyNetT<T>::StepIds>& steps,
                                     std::span<const int> actions, std::span<const double> targets,
                                     std::span<const double> advantages, double entropy_coef, double value_coef) {
    if (steps.empty() || steps.size() != actions.size() || steps.size() != targets.size() ||
        steps.size() != advantages.size())
        throw ValueError("build_a3c_loss: step/action/target lengths disagree");

    typename TapeT<T>::Id loss = -1;
    for (size_t t = 0; t < steps.size(); ++t) {
        const auto& ids = steps[t];
        if (!(tape.val(ids.policy).data[size_t(actions[t])] > T(0)))
            throw ValueError("build_a3c_loss: taken action has zero probability (log singularity)");

        auto policy_term = tape.scale(tape.pick(ids.log_policy, actions[t]), T(-advantages[t]));
        // -beta*H(pi) == +beta * sum(p * log p)
        auto neg_entropy = tape.scale(tape.sum(tape.mul(ids.policy, ids.log_policy)), T(entropy_coef));
        auto diff = tape.add_const(ids.value, T(-targets[t]));
        auto value_term = tape.scale(tape.mul(diff, diff), T(value_coef));

        auto term = tape.add(tape.add(policy_term, neg_entropy), value_term);
        loss = (loss < 0) ? term : tape.add(loss, term);
    }
    return loss;
}

template TapeT<float>::Id build_a3c_loss<float>(TapeT<float>&, const std::vector<PolicyNetT<float>::StepIds>&,
                                                std::span<const int>, std::span<const double>,
                                                std::span<const double>, double, double);
template TapeT<double>::Id build_a3c_loss<double>(TapeT<double>&, const std::vector<PolicyNetT<double>::StepIds>&,
                                                  std::span<const int>, std::span<const double>,
                                                  std::span<const double>, double, double);

std::string episode_csv_header() {
    return "worker,episode,start_checkpoint,steps,distance_m,mean_speed_kmh,hits,crash_reason\n";
}

std::string episode_csv_row(const EpisodeRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%ld,%d,%ld,%.3f,%.3f,%d,%s\n", r.worker, r.episode, r.start_checkpoint,
                  r.steps, r.distance_m, r.mean_speed_kmh, r.hits, r.crash_reason.c_str());
    return buf;
}

std::vector<EpisodeRecord> parse_episode_csv(const std::string& text, double checkpoint_spacing) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "worker,episode,start_checkpoint,steps,distance_m,mean_speed_kmh,hits,crash_reason")
        throw IoError("episode CSV header mismatch");
    std::vector<EpisodeRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        EpisodeRecord r;
        char reason[64] = {0};
        const int n = std::sscanf(line.c_str(), "%d,%ld,%d,%ld,%lf,%lf,%d,%63s", &r.worker, &r.episode,
                                  &r.start_checkpoint, &r.steps, &r.distance_m, &r.mean_speed_kmh, &r.hits, reason);
        if (n != 8) throw IoError("episode CSV parse error at line " + std::to_string(lineno));
        r.crash_reason = reason;
        // Reconstruct the visited interval from spawn point and distance.
        const double start_s = r.start_checkpoint * checkpoint_spacing;
        r.end_s = start_s + r.distance_m;
        r.min_s = std::min(start_s, r.end_s);
        r.max_s = std::max(start_s, r.end_s);
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

struct EpisodeTally {
    long index = 0;
    int start_cp = 0;
    long steps = 0;
    double sum_v = 0;
    int hits = 0;
    double start_s = 0, min_s = 0, max_s = 0, end_s = 0;

    void begin(long idx, int cp, double s0) {
        *this = EpisodeTally{};
        index = idx;
        start_cp = cp;
        start_s = min_s = max_s = end_s = s0;
    }
    void on_step(double s_now, double speed, bool hit) {
        steps += 1;
        sum_v += speed;
        if (hit) hits += 1;
        min_s = std::min(min_s, s_now);
        max_s = std::max(max_s, s_now);
        end_s = s_now;
    }
};

}  // namespace

void worker_loop(int worker_id, int track_index, EnvClient& env, ParamClient& params, const TrainerConfig& cfg,
                 StepBudget& budget, const RecordSink& sink) {
    cfg.validate();
    PolicyNetT<float> net(cfg.net, 0);  // weights come from the server on the first sync

    Rng policy_rng(derive_seed(cfg.seed, SeedStream::WorkerPolicy, uint64_t(worker_id)));
    Rng respawn_rng(derive_seed(cfg.seed, SeedStream::WorkerRespawn, uint64_t(worker_id)));

    const HelloPayload hello = env.hello(cfg.net.height, cfg.net.width, track_index);
    const double track_len = hello.track_length;

    auto to_observation = [&](const ObsPayload& p, int prev_action) {
        Observation o;
        o.h = cfg.net.height;
        o.w = cfg.net.width;
        o.frame_rgb = p.frame;
        o.speed = p.speed;
        o.prev_action = prev_action;
        o.signal = FrameSignal{p.speed, p.alpha, p.d, p.r_w};
        o.progress = p.progress;
        return o;
    };

    long episode_counter = 0;
    int start_cp = respawn_choice(cfg.respawn, hello.checkpoints, respawn_rng);
    ObsPayload cur = env.reset(start_cp);
    int prev_action = -1;
    TensorT<float> h = net.initial_hidden(), c = net.initial_hidden();
    EpisodeTally ep;
    ep.begin(episode_counter, start_cp, double(cur.progress) * track_len);

    auto emit = [&](const std::string& reason) {
        EpisodeRecord r;
        r.worker = worker_id;
        r.episode = ep.index;
        r.start_checkpoint = ep.start_cp;
        r.steps = ep.steps;
        r.distance_m = ep.end_s - ep.start_s;
        r.mean_speed_kmh = ep.steps ? (ep.sum_v / double(ep.steps)) * 3.6 : 0.0;
        r.hits = ep.hits;
        r.crash_reason = reason;
        r.min_s = ep.min_s;
        r.max_s = ep.max_s;
        r.end_s = ep.end_s;
        sink(r);
        ep.steps = 0;  // consumed
    };

    auto next_episode = [&] {
        episode_counter += 1;
        start_cp = respawn_choice(cfg.respawn, hello.checkpoints, respawn_rng);
        cur = env.reset(start_cp);
        prev_action = -1;
        h = net.initial_hidden();
        c = net.initial_hidden();
        ep.begin(episode_counter, start_cp, double(cur.progress) * track_len);
    };

    bool out_of_budget = false;
    while (!out_of_budget) {
        const ParamsPayload snap = params.get();
        net.params().unflatten(snap.weights);

        TapeT<float> tape;
        const auto mounted = net.mount(tape, true);
        auto h_id = tape.leaf(h);
        auto c_id = tape.leaf(c);

        std::vector<PolicyNetT<float>::StepIds> steps;
        std::vector<int> actions;
        std::vector<Transition> trans;
        bool terminal = false;
        std::string end_reason;

        for (int t = 0; t < cfg.t_max; ++t) {
            if (!budget.take()) {
                out_of_budget = true;
                break;
            }
            const Observation o = to_observation(cur, prev_action);
            const auto frame = net.frame_leaf(tape, o, false);
            const auto sid = net.build_step(tape, mounted, frame, o, h_id, c_id);
            const auto& probs = tape.val(sid.policy).data;
            const int a = sample_action(probs, policy_rng);
            ObsPayload next = env.act(a);

            const FrameSignal sig{next.speed, next.alpha, next.d, next.r_w};
            const double reward = compute_reward(cfg.reward, sig) * cfg.reward_scale;

            steps.push_back(sid);
            actions.push_back(a);
            trans.push_back({a, reward, double(tape.val(sid.value).data[0]), double(probs[size_t(a)]),
                             next.terminal()});
            ep.on_step(double(next.progress) * track_len, next.speed, next.flags & OBS_HIT);

            h_id = sid.h;
            c_id = sid.c;
            prev_action = a;
            cur = std::move(next);

            if (cur.terminal()) {
                terminal = true;
                end_reason = (cur.flags & OBS_FINISHED) ? "finished" : to_string(CrashReason(cur.crash_reason_code()));
                break;
            }
            if (ep.steps >= cfg.episode_step_cap) {
                end_reason = "budget";  // cut, not terminal: bootstrap from the value
                break;
            }
        }

        if (!steps.empty()) {
            // hidden state carried across rollouts within the episode
            h = tape.val(h_id);
            c = tape.val(c_id);

            RolloutBatch batch;
            batch.steps = trans;
            if (!terminal) {
                const Observation o = to_observation(cur, prev_action);
                const auto frame = net.frame_leaf(tape, o, false);
                const auto bid = net.build_step(tape, mounted, frame, o, h_id, c_id);
                batch.bootstrap_value = double(tape.val(bid.value).data[0]);
            }
            const auto targets = n_step_targets(batch, cfg.gamma);
            std::vector<double> advantages(targets.size());
            for (size_t i = 0; i < targets.size(); ++i) advantages[i] = targets[i] - trans[i].value;

            const auto loss =
                build_a3c_loss<float>(tape, steps, actions, targets, advantages, cfg.entropy_coef, cfg.value_coef);
            tape.backward(loss);
            ParamSet grads = net.collect_grads(tape, mounted);
            clip_global_norm(grads, cfg.grad_clip);
            params.push(snap.version, grads.flatten());
        }

        if (!end_reason.empty()) {
            emit(end_reason);
            if (!out_of_budget) next_episode();
        }
    }
    if (ep.steps > 0) emit("budget");  // partial episode at the end of the run
}

}  // namespace ra3c
