#pragma once

#include "ra3c/trainer.hpp"

namespace ra3c {

// Whole-run configuration: trainer settings plus topology, optimizer
// hyperparameters, tracks and output paths. Parsed from a line-oriented
// "key = value" file; '#' starts a comment; unknown keys are errors.
// RA3C_SEED in the environment overrides the seed.
struct RunConfig {
    TrainerConfig trainer;
    double lr = 7e-4;
    double rmsprop_decay = 0.99;
    double rmsprop_eps = 0.1;
    std::vector<std::string> tracks;  // paths or "gen:<seed>:<length_m>:<difficulty>"
    int workers = 4;
    std::string env_addr = "127.0.0.1:7801";
    std::string params_addr = "127.0.0.1:7802";
    long checkpoint_interval = 0;  // env steps between checkpoints, 0 = final only
    std::string out_dir = "out";
    bool sim_jitter = false;
    int eval_episodes = 10;

    void validate() const;
};

RunConfig config_from_string(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

// Applies one key=value pair (same keys as the file format).
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// All recognized keys, for help text and the parity test.
std::vector<std::string> config_keys();

}  // namespace ra3c
