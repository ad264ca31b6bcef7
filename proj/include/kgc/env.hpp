#pragma once
// The RL environment. Episodes walk a list of contexts; each step the agent
// picks a candidate (0..K-1) or rejects (K). Correct picks are inserted into
// the working graph, wrong picks are recorded but never inserted, so the
// graph only ever gains ground-truth facts.
//
// Reward table:
//   picked the correct candidate  +1.0   (and it is inserted)
//   picked a wrong candidate      -1.0
//   rejected, but a correct
//     candidate was offered       -0.2
//   rejected a distractor-only
//     context                     +0.5

#include "kgc/context.hpp"
#include "kgc/encoder.hpp"
#include "kgc/errors.hpp"
#include "kgc/graph.hpp"

#include <string>
#include <vector>

namespace kgc {

inline constexpr double kRewardCorrect = 1.0;
inline constexpr double kRewardWrong = -1.0;
inline constexpr double kRewardRejectMissed = -0.2;
inline constexpr double kRewardRejectRight = 0.5;

/// K candidate-selection actions plus Reject.
inline int action_count(int k) { return k + 1; }

struct Transition {
    std::vector<double> next_state;
    double reward = 0.0;
    bool done = false;
};

struct DecisionTally {
    int correct = 0;
    int incorrect = 0;
    int rejected = 0;
};

class Environment {
public:
    Environment(const KnowledgeGraph& train_graph, EncoderConfig encoder)
        : base_(&train_graph), encoder_(encoder) {}

    /// Start an episode: restore the train graph, rewind, encode context 0.
    std::vector<double> reset(Episode episode) {
        if (episode.contexts.empty()) throw ArgumentError("episode has no contexts");
        episode_ = std::move(episode);
        working_ = *base_;
        cursor_ = 0;
        tally_ = DecisionTally{};
        return encode_state(working_, episode_.contexts[0], encoder_);
    }

    Transition step(int action) {
        if (done()) throw StateError("step called after episode end");
        const int k = encoder_.num_candidates;
        if (action < 0 || action > k) {
            throw ArgumentError("action " + std::to_string(action) + " out of range [0," +
                                std::to_string(k) + "]");
        }
        const CompressedContext& ctx = episode_.contexts[static_cast<std::size_t>(cursor_)];

        Transition tr;
        if (action == k) {
            ++tally_.rejected;
            tr.reward = ctx.correct_index ? kRewardRejectMissed : kRewardRejectRight;
        } else if (ctx.correct_index && action == *ctx.correct_index) {
            ++tally_.correct;
            tr.reward = kRewardCorrect;
            working_.insert(ctx.candidates[static_cast<std::size_t>(action)]);
        } else {
            ++tally_.incorrect;
            tr.reward = kRewardWrong;
        }

        ++cursor_;
        tr.done = done();
        if (tr.done) {
            tr.next_state.assign(static_cast<std::size_t>(encoder_.state_dim()), 0.0);
        } else {
            tr.next_state =
                encode_state(working_, episode_.contexts[static_cast<std::size_t>(cursor_)], encoder_);
        }
        return tr;
    }

    /// Best action for the pending context: correct_index, or Reject.
    int oracle_action() const {
        if (done()) throw StateError("no pending context");
        const CompressedContext& ctx = episode_.contexts[static_cast<std::size_t>(cursor_)];
        return ctx.correct_index ? *ctx.correct_index : encoder_.num_candidates;
    }

    bool done() const { return cursor_ >= static_cast<int>(episode_.contexts.size()); }
    int cursor() const { return cursor_; }
    int num_actions() const { return action_count(encoder_.num_candidates); }
    const DecisionTally& tally() const { return tally_; }
    const KnowledgeGraph& working_graph() const { return working_; }
    const EncoderConfig& encoder() const { return encoder_; }

private:
    const KnowledgeGraph* base_;
    EncoderConfig encoder_;
    KnowledgeGraph working_;
    Episode episode_;
    int cursor_ = 0;
    DecisionTally tally_;
};

} // namespace kgc
