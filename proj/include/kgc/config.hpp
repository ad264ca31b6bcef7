#pragma once
// Run configuration: a flat key=value file with section prefixes
// (agent.gamma=0.99). '#' starts a comment, blank lines are fine, unknown
// keys are rejected. Every command copies its resolved config into the
// output directory so runs are reproducible from their artifacts alone.
//
// Two keys resolve from the run seed when not set explicitly:
//   agent.seed                 <- derive_seed(seed, "train")
//   agent.epsilon_decay_steps  <- total_steps / 2

#include "kgc/agent.hpp"
#include "kgc/encoder.hpp"
#include "kgc/errors.hpp"
#include "kgc/rng.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>

namespace kgc {

struct BaselineConfig {
    int supervised_epochs = 300;
    double supervised_lr = 0.1;
};

struct RunConfig {
    std::string dataset_path;
    double holdout_fraction = 0.2;
    int k = 5;
    int m = 16;
    double distractor_prob = 0.2;
    EncoderConfig encoder;
    AgentConfig agent;
    BaselineConfig baseline;
    std::size_t eval_contexts = 1000;
    int eval_repeat = 1;
    std::string output_dir = "out";
    std::uint64_t seed = 42;

    // explicit-key tracking for the two derived values
    bool agent_seed_explicit = false;
    bool epsilon_decay_explicit = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

inline long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size() || value.front() == '-') throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
    }
}

inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dataset_path") cfg.dataset_path = value;
    else if (key == "holdout_fraction") cfg.holdout_fraction = parse_double(key, value);
    else if (key == "k") cfg.k = static_cast<int>(parse_long(key, value));
    else if (key == "m") cfg.m = static_cast<int>(parse_long(key, value));
    else if (key == "distractor_prob") cfg.distractor_prob = parse_double(key, value);
    else if (key == "encoder.d_embed") cfg.encoder.d_embed = static_cast<int>(parse_long(key, value));
    else if (key == "encoder.hash_seed") cfg.encoder.hash_seed = parse_u64(key, value);
    else if (key == "agent.gamma") cfg.agent.gamma = parse_double(key, value);
    else if (key == "agent.learning_rate") cfg.agent.learning_rate = parse_double(key, value);
    else if (key == "agent.epsilon_start") cfg.agent.epsilon_start = parse_double(key, value);
    else if (key == "agent.epsilon_end") cfg.agent.epsilon_end = parse_double(key, value);
    else if (key == "agent.epsilon_decay_steps") {
        cfg.agent.epsilon_decay_steps = parse_long(key, value);
        cfg.epsilon_decay_explicit = true;
    } else if (key == "agent.batch_size") cfg.agent.batch_size = static_cast<int>(parse_long(key, value));
    else if (key == "agent.buffer_capacity") {
        cfg.agent.buffer_capacity = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "agent.target_sync_interval") {
        cfg.agent.target_sync_interval = parse_long(key, value);
    } else if (key == "agent.total_steps") cfg.agent.total_steps = parse_long(key, value);
    else if (key == "agent.seed") {
        cfg.agent.seed = parse_u64(key, value);
        cfg.agent_seed_explicit = true;
    } else if (key == "baseline.supervised_epochs") {
        cfg.baseline.supervised_epochs = static_cast<int>(parse_long(key, value));
    } else if (key == "baseline.supervised_lr") {
        cfg.baseline.supervised_lr = parse_double(key, value);
    } else if (key == "eval_contexts") {
        cfg.eval_contexts = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "eval_repeat") cfg.eval_repeat = static_cast<int>(parse_long(key, value));
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else throw ConfigError("unknown key '" + key + "'");
}

} // namespace detail

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_number) + ": expected key=value");
        }
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_number) + ": empty key");
        }
        try {
            detail::apply_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return cfg;
}

inline RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    return parse_config(in);
}

/// Fill in seed-derived values and cross-wire the candidate count.
inline void resolve_config(RunConfig& cfg) {
    cfg.encoder.num_candidates = cfg.k;
    if (!cfg.agent_seed_explicit) cfg.agent.seed = derive_seed(cfg.seed, "train");
    if (!cfg.epsilon_decay_explicit) {
        cfg.agent.epsilon_decay_steps = std::max(1l, cfg.agent.total_steps / 2);
    }
}

inline void validate_config(const RunConfig& cfg) {
    if (!(cfg.holdout_fraction >= 0.0 && cfg.holdout_fraction <= 1.0)) {
        throw ConfigError("holdout_fraction must be in [0,1]");
    }
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.m < 1) throw ConfigError("m must be >= 1");
    if (!(cfg.distractor_prob >= 0.0 && cfg.distractor_prob <= 1.0)) {
        throw ConfigError("distractor_prob must be in [0,1]");
    }
    if (cfg.encoder.d_embed < 1) throw ConfigError("encoder.d_embed must be >= 1");
    if (cfg.baseline.supervised_epochs < 0) throw ConfigError("baseline.supervised_epochs must be >= 0");
    if (!(cfg.baseline.supervised_lr > 0.0)) throw ConfigError("baseline.supervised_lr must be positive");
    if (cfg.eval_contexts < 1) throw ConfigError("eval_contexts must be >= 1");
    if (cfg.eval_repeat < 1) throw ConfigError("eval_repeat must be >= 1");
    if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
    try {
        cfg.agent.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("agent: ") + e.what());
    }
}

/// Canonical key=value dump of a resolved config; byte-stable across runs.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "dataset_path=" << cfg.dataset_path << '\n';
    out << "holdout_fraction=" << num(cfg.holdout_fraction) << '\n';
    out << "k=" << cfg.k << '\n';
    out << "m=" << cfg.m << '\n';
    out << "distractor_prob=" << num(cfg.distractor_prob) << '\n';
    out << "encoder.d_embed=" << cfg.encoder.d_embed << '\n';
    out << "encoder.hash_seed=" << cfg.encoder.hash_seed << '\n';
    out << "agent.gamma=" << num(cfg.agent.gamma) << '\n';
    out << "agent.learning_rate=" << num(cfg.agent.learning_rate) << '\n';
    out << "agent.epsilon_start=" << num(cfg.agent.epsilon_start) << '\n';
    out << "agent.epsilon_end=" << num(cfg.agent.epsilon_end) << '\n';
    out << "agent.epsilon_decay_steps=" << cfg.agent.epsilon_decay_steps << '\n';
    out << "agent.batch_size=" << cfg.agent.batch_size << '\n';
    out << "agent.buffer_capacity=" << cfg.agent.buffer_capacity << '\n';
    out << "agent.target_sync_interval=" << cfg.agent.target_sync_interval << '\n';
    out << "agent.total_steps=" << cfg.agent.total_steps << '\n';
    out << "agent.seed=" << cfg.agent.seed << '\n';
    out << "baseline.supervised_epochs=" << cfg.baseline.supervised_epochs << '\n';
    out << "baseline.supervised_lr=" << num(cfg.baseline.supervised_lr) << '\n';
    out << "eval_contexts=" << cfg.eval_contexts << '\n';
    out << "eval_repeat=" << cfg.eval_repeat << '\n';
    out << "output_dir=" << cfg.output_dir << '\n';
    out << "seed=" << cfg.seed << '\n';
    return out.str();
}

} // namespace kgc
