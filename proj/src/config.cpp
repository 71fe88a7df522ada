#include "ra3c/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ra3c {

void RunConfig::validate() const {
    trainer.validate();
    if (workers < 1) throw ValueError("workers must be >= 1");
    if (lr <= 0) throw ValueError("lr must be positive");
    if (rmsprop_decay < 0 || rmsprop_decay >= 1) throw ValueError("rmsprop_decay must be in [0,1)");
    if (rmsprop_eps <= 0) throw ValueError("rmsprop_eps must be positive");
    if (eval_episodes < 1) throw ValueError("eval_episodes must be >= 1");
    if (checkpoint_interval < 0) throw ValueError("checkpoint_interval must be >= 0");
}

static bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValueError("key '" + key + "' expects a boolean, got '" + v + "'");
}

static double parse_num(const std::string& v, const std::string& key) {
    size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (...) {
        throw ValueError("key '" + key + "' expects a number, got '" + v + "'");
    }
    if (used != v.size()) throw ValueError("key '" + key + "' expects a number, got '" + v + "'");
    return out;
}

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&] { return parse_num(value, key); };
    if (key == "gamma") {
        cfg.trainer.gamma = num();
        if (!(cfg.trainer.gamma >= 0) || cfg.trainer.gamma >= 1)
            throw ValueError("gamma must satisfy 0 <= gamma < 1, got " + value);
    } else if (key == "t_max") {
        cfg.trainer.t_max = int(num());
    } else if (key == "entropy_coef") {
        cfg.trainer.entropy_coef = num();
    } else if (key == "value_coef") {
        cfg.trainer.value_coef = num();
    } else if (key == "grad_clip") {
        cfg.trainer.grad_clip = num();
    } else if (key == "respawn") {
        cfg.trainer.respawn = respawn_from_string(value);
    } else if (key == "reward") {
        cfg.trainer.reward = reward_kind_from_string(value);
    } else if (key == "reward_scale") {
        cfg.trainer.reward_scale = num();
    } else if (key == "encoder") {
        // resets feed_speed_action to the variant default; override it after
        const int lstm = cfg.trainer.net.lstm_size;
        const int h = cfg.trainer.net.height, w = cfg.trainer.net.width;
        const int k = cfg.trainer.net.actions;
        cfg.trainer.net = NetConfig::for_variant(encoder_from_string(value));
        cfg.trainer.net.lstm_size = lstm;
        cfg.trainer.net.height = h;
        cfg.trainer.net.width = w;
        cfg.trainer.net.actions = k;
    } else if (key == "frame_h") {
        cfg.trainer.net.height = int(num());
    } else if (key == "frame_w") {
        cfg.trainer.net.width = int(num());
    } else if (key == "lstm_size") {
        cfg.trainer.net.lstm_size = int(num());
    } else if (key == "feed_speed_action") {
        cfg.trainer.net.feed_speed_action = parse_bool(value, key);
    } else if (key == "max_steps") {
        cfg.trainer.max_steps = long(num());
    } else if (key == "episode_step_cap") {
        cfg.trainer.episode_step_cap = int(num());
    } else if (key == "seed") {
        cfg.trainer.seed = uint64_t(num());
    } else if (key == "lr") {
        cfg.lr = num();
    } else if (key == "rmsprop_decay") {
        cfg.rmsprop_decay = num();
    } else if (key == "rmsprop_eps") {
        cfg.rmsprop_eps = num();
    } else if (key == "workers") {
        cfg.workers = int(num());
    } else if (key == "checkpoint_interval") {
        cfg.checkpoint_interval = long(num());
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "env_addr") {
        cfg.env_addr = value;
    } else if (key == "params_addr") {
        cfg.params_addr = value;
    } else if (key == "sim_jitter") {
        cfg.sim_jitter = parse_bool(value, key);
    } else if (key == "eval_episodes") {
        cfg.eval_episodes = int(num());
    } else if (key == "tracks") {
        cfg.tracks.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            while (!item.empty() && item.front() == ' ') item.erase(item.begin());
            while (!item.empty() && item.back() == ' ') item.pop_back();
            if (!item.empty()) cfg.tracks.push_back(item);
        }
    } else {
        throw ValueError("unknown config key '" + key + "'");
    }
}

std::vector<std::string> config_keys() {
    return {"gamma",         "t_max",      "entropy_coef",     "value_coef",        "grad_clip",
            "respawn",       "reward",     "reward_scale",     "encoder",           "frame_h",
            "frame_w",       "lstm_size",  "feed_speed_action", "max_steps",        "episode_step_cap",
            "seed",          "lr",         "rmsprop_decay",    "rmsprop_eps",       "workers",
            "checkpoint_interval", "out_dir", "env_addr",      "params_addr",       "sim_jitter",
            "eval_episodes", "tracks"};
}

RunConfig config_from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValueError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        auto trim = [](std::string s) {
            size_t x = s.find_first_not_of(" \t");
            if (x == std::string::npos) return std::string();
            size_t y = s.find_last_not_of(" \t");
            return s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ValueError("config line " + std::to_string(lineno) + ": empty key");
        try {
            apply_config_kv(cfg, key, value);
        } catch (const ValueError& e) {
            throw ValueError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (const char* env_seed = std::getenv("RA3C_SEED")) cfg.trainer.seed = uint64_t(std::atoll(env_seed));
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return config_from_string(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
    std::ostringstream out;
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
    };
    out << "gamma = " << num(cfg.trainer.gamma) << "\n";
    out << "t_max = " << cfg.trainer.t_max << "\n";
    out << "entropy_coef = " << num(cfg.trainer.entropy_coef) << "\n";
    out << "value_coef = " << num(cfg.trainer.value_coef) << "\n";
    out << "grad_clip = " << num(cfg.trainer.grad_clip) << "\n";
    out << "respawn = " << to_string(cfg.trainer.respawn) << "\n";
    out << "reward = " << to_string(cfg.trainer.reward) << "\n";
    out << "reward_scale = " << num(cfg.trainer.reward_scale) << "\n";
    out << "encoder = " << to_string(cfg.trainer.net.variant) << "\n";
    out << "frame_h = " << cfg.trainer.net.height << "\n";
    out << "frame_w = " << cfg.trainer.net.width << "\n";
    out << "lstm_size = " << cfg.trainer.net.lstm_size << "\n";
    out << "feed_speed_action = " << (cfg.trainer.net.feed_speed_action ? "true" : "false") << "\n";
    out << "max_steps = " << cfg.trainer.max_steps << "\n";
    out << "episode_step_cap = " << cfg.trainer.episode_step_cap << "\n";
    out << "seed = " << cfg.trainer.seed << "\n";
    out << "lr = " << num(cfg.lr) << "\n";
    out << "rmsprop_decay = " << num(cfg.rmsprop_decay) << "\n";
    out << "rmsprop_eps = " << num(cfg.rmsprop_eps) << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "checkpoint_interval = " << cfg.checkpoint_interval << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "env_addr = " << cfg.env_addr << "\n";
    out << "params_addr = " << cfg.params_addr << "\n";
    out << "sim_jitter = " << (cfg.sim_jitter ? "true" : "false") << "\n";
    out << "eval_episodes = " << cfg.eval_episodes << "\n";
    if (!cfg.tracks.empty()) {
        out << "tracks = ";
        for (size_t i = 0; i < cfg.tracks.size(); ++i) out << (i ? "," : "") << cfg.tracks[i];
        out << "\n";
    }
    return out.str();
}

}  // namespace ra3c
