#pragma once
// The DQN learning loop: epsilon-greedy selection, bounded FIFO replay,
// TD targets against a periodically synced frozen copy, one averaged SGD
// step per environment step once the buffer holds a full batch.
//
// A whole run consumes a single SplitMix64 seeded from AgentConfig::seed,
// in fixed order per step: epsilon draw, (random-action draw), then the
// batch index draws. That makes runs bit-reproducible.
//
// TabularQ implements the classic update
//   Q(s,a) <- Q(s,a) + alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
// and exists as a verification oracle for the network path, not as a
// runtime alternative.

#include "kgc/env.hpp"
#include "kgc/errors.hpp"
#include "kgc/qnet.hpp"
#include "kgc/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

namespace kgc {

struct Experience {
    std::vector<double> s;
    int a = 0;
    double r = 0.0;
    std::vector<double> s_next;
    bool done = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw ArgumentError("replay capacity must be positive");
    }

    void push(Experience e) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(e));
        } else {
            storage_[write_cursor_] = std::move(e); // overwrite oldest
        }
        write_cursor_ = (write_cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool ready(std::size_t batch_size) const { return storage_.size() >= batch_size; }

    /// Element i in oldest-to-newest order.
    const Experience& at(std::size_t i) const {
        if (storage_.size() < capacity_) return storage_[i];
        return storage_[(write_cursor_ + i) % capacity_];
    }

    /// Uniform sample with replacement; nullopt (consuming no draws) while
    /// fewer than batch_size experiences are stored.
    std::optional<std::vector<Experience>> sample(std::size_t batch_size, SplitMix64& rng) const {
        if (!ready(batch_size)) return std::nullopt;
        std::vector<Experience> batch;
        batch.reserve(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i) {
            batch.push_back(storage_[rng.uniform_below(storage_.size())]);
        }
        return batch;
    }

private:
    std::size_t capacity_;
    std::vector<Experience> storage_;
    std::size_t write_cursor_ = 0;
};

struct AgentConfig {
    double gamma = 0.99;
    double learning_rate = 1e-3;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    long epsilon_decay_steps = 25000;
    int batch_size = 32;
    std::size_t buffer_capacity = 10000;
    long target_sync_interval = 250;
    long total_steps = 50000;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must be in [0,1]");
        if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
        if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
            !(epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
            throw ArgumentError("epsilon bounds must be in [0,1]");
        }
        if (epsilon_end > epsilon_start) throw ArgumentError("epsilon_end must be <= epsilon_start");
        if (epsilon_decay_steps < 1) throw ArgumentError("epsilon_decay_steps must be positive");
        if (batch_size < 1) throw ArgumentError("batch_size must be positive");
        if (buffer_capacity < 1) throw ArgumentError("buffer_capacity must be positive");
        if (target_sync_interval < 1) throw ArgumentError("target_sync_interval must be positive");
        if (total_steps < 0) throw ArgumentError("total_steps must be non-negative");
    }
};

/// Argmax with ties broken toward the lowest index.
inline int argmax_action(const std::vector<double>& q_values) {
    if (q_values.empty()) throw ArgumentError("empty Q-value vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(q_values.size()); ++i) {
        if (q_values[static_cast<std::size_t>(i)] > q_values[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

/// Epsilon-greedy: uniform random with probability epsilon, else greedy.
inline int select_action(const std::vector<double>& q_values, double epsilon, SplitMix64& rng) {
    if (q_values.empty()) throw ArgumentError("empty Q-value vector");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ArgumentError("epsilon must be in [0,1]");
    if (rng.next_double() < epsilon) {
        return static_cast<int>(rng.uniform_below(q_values.size()));
    }
    return argmax_action(q_values);
}

/// Linear decay from epsilon_start to epsilon_end over epsilon_decay_steps,
/// constant afterwards.
inline double epsilon_at(long step, const AgentConfig& cfg) {
    if (step >= cfg.epsilon_decay_steps) return cfg.epsilon_end;
    const double t = static_cast<double>(step) / static_cast<double>(cfg.epsilon_decay_steps);
    return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * t;
}

/// r + gamma * max_a' Q(s', a'; theta^-), with the future term dropped on
/// terminal transitions.
inline double td_target(const Experience& e, double gamma, const TargetParams& target) {
    if (e.done) return e.r;
    const std::vector<double> q = forward(target, e.s_next);
    return e.r + gamma * *std::max_element(q.begin(), q.end());
}

// --- tabular reference ------------------------------------------------

struct TabularExperience {
    int s = 0;
    int a = 0;
    double r = 0.0;
    int s_next = 0;
    bool done = false;
};

class TabularQ {
public:
    explicit TabularQ(int num_actions) : num_actions_(num_actions) {
        if (num_actions < 1) throw ArgumentError("need at least one action");
    }

    double get(int state, int action) const {
        auto it = table_.find(state);
        return it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(action)];
    }

    double max_q(int state) const {
        auto it = table_.find(state);
        if (it == table_.end()) return 0.0;
        return *std::max_element(it->second.begin(), it->second.end());
    }

    double& ref(int state, int action) {
        auto it = table_.try_emplace(state, std::vector<double>(
                                                static_cast<std::size_t>(num_actions_), 0.0)).first;
        return it->second[static_cast<std::size_t>(action)];
    }

    int num_actions() const { return num_actions_; }

private:
    int num_actions_;
    std::unordered_map<int, std::vector<double>> table_;
};

inline void tabular_update(TabularQ& q, const TabularExperience& e, double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must be in (0,1]");
    const double future = e.done ? 0.0 : q.max_q(e.s_next);
    double& cell = q.ref(e.s, e.a);
    cell += alpha * (e.r + gamma * future - cell);
}

// --- training loop -----------------------------------------------------

struct TrainingLogRow {
    long step = 0;
    double epsilon = 0.0;
    double reward = 0.0;
    double loss = 0.0;          // 0 while the buffer is still warming up
    double episode_return = 0.0; // running return of the current episode
};

struct TrainResult {
    QNetwork net;
    std::vector<TrainingLogRow> log;
    std::vector<std::uint8_t> greedy_hit; // per step: argmax action matched the oracle
};

/// Fraction of the final `window` steps whose greedy action was correct.
inline double greedy_accuracy(const std::vector<std::uint8_t>& hits, std::size_t window = 500) {
    if (hits.empty()) return 0.0;
    const std::size_t n = std::min(window, hits.size());
    std::size_t sum = 0;
    for (std::size_t i = hits.size() - n; i < hits.size(); ++i) sum += hits[i];
    return static_cast<double>(sum) / static_cast<double>(n);
}

/// Produces the episode with the given ordinal (0, 1, 2, ...).
using EpisodeSource = std::function<Episode(std::size_t)>;

/// Run total_steps environment steps over episodes drawn from `episodes`.
/// One SGD step per environment step once the buffer is ready; target
/// params resync every target_sync_interval steps.
inline TrainResult train(Environment& env, const EpisodeSource& episodes, const AgentConfig& cfg,
                         QNetwork net) {
    cfg.validate();
    if (!episodes) throw ArgumentError("no episode source");
    if (net.output_dim() != env.num_actions()) {
        throw ArgumentError("network output width does not match action count");
    }

    TrainResult result;
    result.log.reserve(static_cast<std::size_t>(cfg.total_steps));
    result.greedy_hit.reserve(static_cast<std::size_t>(cfg.total_steps));

    SplitMix64 rng(cfg.seed);
    ReplayBuffer buffer(cfg.buffer_capacity);
    TargetParams target = sync_target(net);
    GradientSet grads = make_gradients(net);

    std::size_t episode_idx = 0;
    std::vector<double> state;
    double episode_return = 0.0;

    for (long step = 0; step < cfg.total_steps; ++step) {
        if (step == 0 || env.done()) {
            state = env.reset(episodes(episode_idx));
            ++episode_idx;
            episode_return = 0.0;
        }

        const double eps = epsilon_at(step, cfg);
        const std::vector<double> q = forward(net, state);
        result.greedy_hit.push_back(argmax_action(q) == env.oracle_action() ? 1 : 0);
        const int action = select_action(q, eps, rng);

        Transition tr = env.step(action);
        episode_return += tr.reward;
        buffer.push(Experience{state, action, tr.reward, tr.next_state, tr.done});

        double loss = 0.0;
        if (auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng)) {
            for (auto& g : grads.weights) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grads.biases) std::fill(g.begin(), g.end(), 0.0);
            for (const Experience& e : *batch) {
                loss += detail::accumulate_loss_gradient(net, e.s, e.a,
                                                         td_target(e, cfg.gamma, target), grads);
            }
            const double scale = 1.0 / static_cast<double>(batch->size());
            loss *= scale;
            for (auto& g : grads.weights)
                for (double& x : g) x *= scale;
            for (auto& g : grads.biases)
                for (double& x : g) x *= scale;
            apply_gradients(net, grads, cfg.learning_rate);
        }

        if ((step + 1) % cfg.target_sync_interval == 0) target = sync_target(net);

        result.log.push_back(TrainingLogRow{step, eps, tr.reward, loss, episode_return});
        state = std::move(tr.next_state);
    }

    result.net = std::move(net);
    return result;
}

/// Train over a fixed episode list, cycling it as needed.
inline TrainResult train(Environment& env, const std::vector<Episode>& episodes,
                         const AgentConfig& cfg, QNetwork net) {
    if (episodes.empty()) throw ArgumentError("no episodes to train on");
    return train(
        env, [&episodes](std::size_t i) { return episodes[i % episodes.size()]; }, cfg,
        std::move(net));
}

/// CSV with header step,epsilon,reward,loss,episode_return.
inline void write_training_log(std::ostream& out, const std::vector<TrainingLogRow>& log) {
    out << "step,epsilon,reward,loss,episode_return\n";
    char buf[160];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof(buf), "%ld,%.6f,%.2f,%.8g,%.2f\n", row.step, row.epsilon,
                      row.reward, row.loss, row.episode_return);
        out << buf;
    }
}

} // namespace kgc
