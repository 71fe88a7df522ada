#pragma once

#include "ra3c/config.hpp"
#include "ra3c/metrics.hpp"

namespace ra3c {

// Track specs are either file paths or "gen:<seed>:<length_m>:<difficulty>".
std::shared_ptr<const Track> resolve_track(const std::string& spec);
std::vector<std::shared_ptr<const Track>> resolve_tracks(const RunConfig& cfg);

struct TrainResult {
    std::vector<EpisodeRecord> records;
    uint64_t final_version = 0;
    ParamService::Stats stats;
    std::string csv_path;
    std::string checkpoint_path;
    ParamSet final_params;
};

// Single-machine training: in-process env sessions and parameter service,
// one worker thread per configured worker (track = worker index mod tracks).
TrainResult train_run(const RunConfig& cfg);

// TCP actor-learner against remote env/param servers (blocking).
void worker_run(const RunConfig& cfg, int worker_id);

struct EvalCapRow {
    std::string label;  // "40", "inf", "design"
    EvalResult result;
};

std::vector<EvalCapRow> eval_run(const std::string& checkpoint, const std::string& track_spec, int episodes,
                                 const std::vector<double>& caps_kmh, bool include_design, uint64_t seed,
                                 const std::string& out_csv);

void saliency_run(const std::string& checkpoint, const std::string& track_spec, int frames,
                  const std::string& out_dir, uint64_t seed = 1);

// Training curves (rolling mean +- deviation) and, when a track is supplied,
// the per-5m-segment crash heatmap.
void plot_run(const std::string& csv_path, const std::string& track_spec, const std::string& out_dir);

}  // namespace ra3c
