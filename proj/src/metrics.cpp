#include "ra3c/metrics.hpp"

#include <cmath>

namespace ra3c {

std::pair<std::vector<double>, std::vector<double>> rolling(std::span<const double> series, int window) {
    if (window < 1) throw ValueError("rolling window must be >= 1");
    std::vector<double> means(series.size()), devs(series.size());
    double sum = 0, sumsq = 0;
    for (size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        sumsq += series[i] * series[i];
        if (i >= size_t(window)) {
            sum -= series[i - size_t(window)];
            sumsq -= series[i - size_t(window)] * series[i - size_t(window)];
        }
        const double n = double(std::min(i + 1, size_t(window)));
        const double mean = sum / n;
        means[i] = mean;
        devs[i] = std::sqrt(std::max(0.0, sumsq / n - mean * mean));
    }
    return {means, devs};
}

double hits_per_km(std::span<const EpisodeRecord> episodes) {
    double km = 0;
    long hits = 0;
    for (const auto& e : episodes) {
        km += std::abs(e.distance_m) / 1000.0;
        hits += e.hits;
    }
    if (km <= 0) throw ValueError("hits_per_km: total distance is zero");
    return double(hits) / km;
}

static size_t segment_count(const Track& track) {
    return size_t(std::ceil(track.length() / kSegmentMeters));
}

static std::pair<size_t, size_t> segment_range(const EpisodeRecord& e, const Track& track) {
    const size_t n = segment_count(track);
    const double lo = clamp(e.min_s, 0, track.length());
    const double hi = clamp(e.max_s, 0, track.length());
    size_t a = size_t(lo / kSegmentMeters);
    size_t b = size_t(hi / kSegmentMeters);
    a = std::min(a, n - 1);
    b = std::min(b, n - 1);
    return {a, b};
}

double exploration_pct(std::span<const EpisodeRecord> episodes, const Track& track) {
    const size_t n = segment_count(track);
    std::vector<char> seen(n, 0);
    for (const auto& e : episodes) {
        auto [a, b] = segment_range(e, track);
        for (size_t i = a; i <= b; ++i) seen[i] = 1;
    }
    size_t visited = 0;
    for (char s : seen) visited += size_t(s);
    return 100.0 * double(visited) / double(n);
}

SegmentHistogram SegmentHistogram::build(std::span<const EpisodeRecord> episodes, const Track& track) {
    const size_t n = segment_count(track);
    SegmentHistogram h;
    h.visits.assign(n, 0);
    h.crashes.assign(n, 0);
    for (const auto& e : episodes) {
        auto [a, b] = segment_range(e, track);
        for (size_t i = a; i <= b; ++i) h.visits[i] += 1;
        const bool crash = e.crash_reason == "stalled" || e.crash_reason == "wrong_way" || e.crash_reason == "off_road";
        if (crash) {
            const size_t seg = std::min(size_t(clamp(e.end_s, 0, track.length()) / kSegmentMeters), n - 1);
            h.crashes[seg] += 1;
        }
    }
    return h;
}

long SegmentHistogram::total_crashes() const {
    long total = 0;
    for (long c : crashes) total += c;
    return total;
}

double design_speed(const TrackPoint& point, double friction, double cap_kmh) {
    if (friction <= 0) throw ValueError("design_speed: friction factor must be positive");
    if (point.kappa == 0) return cap_kmh;
    const double radius = 1.0 / std::abs(point.kappa);
    const double e_eff = point.e * (point.kappa >= 0 ? 1.0 : -1.0);  // banking helping the curve
    if (e_eff + friction <= 0) throw ValueError("design_speed: unbankable curve (e + f <= 0)");
    return std::min(cap_kmh, std::sqrt(127.0 * radius * (e_eff + friction)));
}

double design_speed(const TrackSample& at, double friction, double cap_kmh) {
    TrackPoint p;
    p.kappa = at.kappa;
    p.e = at.e;
    return design_speed(p, friction, cap_kmh);
}

EvalResult speed_limited_eval(const PolicyNet& net, std::shared_ptr<const Track> track, const EvalOptions& opts,
                              const SimConfig& sim_cfg) {
    if (opts.episodes < 1) throw ValueError("eval needs at least one episode");
    if (!(opts.cap_kmh > 0)) throw ValueError("speed cap must be positive (car cannot move at 0)");

    Simulator sim(track, sim_cfg);
    RenderConfig render;
    render.height = net.config().height;
    render.width = net.config().width;

    EvalResult out;
    Rng spawn_rng(derive_seed(opts.seed, SeedStream::Eval, 0));
    double sum_v = 0;

    for (int e = 0; e < opts.episodes; ++e) {
        Rng policy_rng(derive_seed(opts.seed, SeedStream::Eval, 1000 + uint64_t(e)));
        const int cp = opts.spawn_random ? spawn_rng.uniform_int(track->checkpoint_count()) : 0;
        sim.spawn(cp, derive_seed(opts.seed, SeedStream::Episode, uint64_t(e)));
        auto h = net.initial_hidden();
        auto c = net.initial_hidden();
        int prev_action = -1;

        EpisodeRecord rec;
        rec.worker = 0;
        rec.episode = e;
        rec.start_checkpoint = cp;
        const double start_s = sim.state().s;
        rec.min_s = rec.max_s = rec.end_s = start_s;
        double ep_sum_v = 0;
        std::string reason = "budget";

        for (int step = 0; step < opts.episode_step_cap; ++step) {
            const Observation obs = observe(sim, render, prev_action);
            const auto net_out = net.forward(obs, h, c);
            h = net_out.h;
            c = net_out.c;
            const int a = sample_action(net_out.policy, policy_rng);
            prev_action = a;

            ControlCommand cmd = class_to_control(a);
            double cap_ms = opts.cap_kmh / 3.6;
            if (opts.design_speed_cap)
                cap_ms = design_speed(track->sample(sim.state().s), opts.design_friction, opts.design_cap_kmh) / 3.6;
            if (std::isfinite(cap_ms) && sim.state().v > cap_ms) {
                cmd.gas = 0;
                if (sim.state().v > 1.1 * cap_ms && !cmd.handbrake) cmd.brake = true;
            }

            const StepEvents ev = sim.step(cmd);
            sum_v += sim.state().v;
            ep_sum_v += sim.state().v;
            out.steps += 1;
            rec.steps += 1;
            if (ev.hit) {
                out.hits += 1;
                rec.hits += 1;
            }
            rec.end_s = sim.state().s;
            rec.min_s = std::min(rec.min_s, rec.end_s);
            rec.max_s = std::max(rec.max_s, rec.end_s);
            if (ev.crash) {
                out.crashes += 1;
                reason = to_string(ev.reason);
                break;
            }
            if (ev.finished) {
                reason = "finished";
                break;
            }
        }
        rec.distance_m = rec.end_s - start_s;
        rec.mean_speed_kmh = rec.steps ? (ep_sum_v / double(rec.steps)) * 3.6 : 0;
        rec.crash_reason = reason;
        out.records.push_back(rec);
        out.distance_km += std::abs(rec.distance_m) / 1000.0;
    }

    out.episodes = opts.episodes;
    out.mean_speed_kmh = out.steps ? (sum_v / double(out.steps)) * 3.6 : 0;
    if (out.distance_km > 0) {
        out.crashes_per_km = double(out.crashes) / out.distance_km;
        out.hits_per_km = double(out.hits) / out.distance_km;
    }
    return out;
}

}  // namespace ra3c
