#pragma once
// Turns held-out triples into integration tasks: candidate sets in which
// at most one entry is the original fact and the rest corrupt exactly one
// position of it.
//
// Everything here is a pure function of (inputs, seed). A context's draw
// order is fixed: ambiguity kind, then truth slot (when present), then one
// replacement per corrupted candidate.

#include "kgc/errors.hpp"
#include "kgc/graph.hpp"
#include "kgc/rng.hpp"
#include "kgc/triple.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace kgc {

enum class AmbiguityKind { MaskedHead, MaskedRelation, MaskedTail };

inline std::string_view to_string(AmbiguityKind kind) {
    switch (kind) {
        case AmbiguityKind::MaskedHead: return "masked-head";
        case AmbiguityKind::MaskedRelation: return "masked-relation";
        case AmbiguityKind::MaskedTail: return "masked-tail";
    }
    return "?";
}

struct CompressedContext {
    std::vector<Triple> candidates;   // length K, pairwise distinct
    std::optional<int> correct_index; // absent on distractor-only contexts
    AmbiguityKind kind = AmbiguityKind::MaskedTail;
};

struct Episode {
    std::vector<CompressedContext> contexts;
    std::uint64_t episode_seed = 0;
};

struct HoldoutSplit {
    KnowledgeGraph train_graph;
    std::vector<Triple> holdout; // in removal order; disjoint from train_graph
    std::uint64_t seed = 0;
};

namespace detail {

inline void seeded_shuffle(std::vector<Triple>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace detail

/// Remove ~fraction of the triples into a holdout list, keeping every
/// entity and relation represented in the remaining train graph (a triple
/// whose removal would orphan a token is kept). Deterministic per seed:
/// triples are canonically sorted, shuffled, then greedily taken.
inline HoldoutSplit split_holdout(const KnowledgeGraph& graph, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw ArgumentError("holdout fraction must be in [0,1]");
    }
    std::vector<Triple> all = graph.all_triples();
    SplitMix64 rng(seed);
    detail::seeded_shuffle(all, rng);

    const std::size_t target =
        static_cast<std::size_t>(std::llround(fraction * static_cast<double>(all.size())));

    // occurrences remaining in train; a triple is removable only while every
    // one of its tokens stays represented afterwards
    std::unordered_map<std::string, std::size_t> entity_uses;
    std::unordered_map<std::string, std::size_t> relation_uses;
    for (const auto& t : all) {
        ++entity_uses[t.head];
        if (t.tail != t.head) ++entity_uses[t.tail];
        ++relation_uses[t.relation];
    }

    HoldoutSplit split;
    split.seed = seed;
    std::vector<Triple> kept;
    kept.reserve(all.size());
    for (const auto& t : all) {
        const bool removable = split.holdout.size() < target &&
                               entity_uses[t.head] >= 2 &&
                               entity_uses[t.tail] >= 2 &&
                               relation_uses[t.relation] >= 2;
        if (removable) {
            --entity_uses[t.head];
            if (t.tail != t.head) --entity_uses[t.tail];
            --relation_uses[t.relation];
            split.holdout.push_back(t);
        } else {
            kept.push_back(t);
        }
    }
    std::sort(kept.begin(), kept.end()); // canonical intern order for the train graph
    split.train_graph = build_graph(kept);
    return split;
}

/// Build one context around a ground-truth triple. K-1 corruptions (K when
/// distractor_only) replace a single uniformly chosen position with vocabulary
/// samples; candidates already in `graph`, duplicates, and the truth itself
/// are rejected, up to 100 attempts each.
inline CompressedContext make_context(const Triple& truth, const KnowledgeGraph& graph, int k,
                                      bool distractor_only, SplitMix64& rng) {
    if (k < 1) throw ArgumentError("context size K must be >= 1");
    if (!graph.has_entity(truth.head) || !graph.has_relation(truth.relation) ||
        !graph.has_entity(truth.tail)) {
        throw ArgumentError("ground-truth tokens missing from graph vocabulary");
    }

    CompressedContext ctx;
    switch (rng.uniform_below(3)) {
        case 0: ctx.kind = AmbiguityKind::MaskedHead; break;
        case 1: ctx.kind = AmbiguityKind::MaskedRelation; break;
        default: ctx.kind = AmbiguityKind::MaskedTail; break;
    }

    int truth_slot = -1;
    if (!distractor_only) {
        truth_slot = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
        ctx.correct_index = truth_slot;
    }

    ctx.candidates.resize(static_cast<std::size_t>(k));
    const auto& entities = graph.entities();
    const auto& relations = graph.relations();

    for (int slot = 0; slot < k; ++slot) {
        if (slot == truth_slot) {
            ctx.candidates[static_cast<std::size_t>(slot)] = truth;
            continue;
        }
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            Triple cand = truth;
            switch (ctx.kind) {
                case AmbiguityKind::MaskedHead:
                    cand.head = entities[rng.uniform_below(entities.size())];
                    if (cand.head == truth.head) continue;
                    break;
                case AmbiguityKind::MaskedRelation:
                    cand.relation = relations[rng.uniform_below(relations.size())];
                    if (cand.relation == truth.relation) continue;
                    break;
                case AmbiguityKind::MaskedTail:
                    cand.tail = entities[rng.uniform_below(entities.size())];
                    if (cand.tail == truth.tail) continue;
                    break;
            }
            if (graph.contains(cand)) continue;
            bool duplicate = false;
            for (int prev = 0; prev < slot; ++prev) {
                if (prev != truth_slot && ctx.candidates[static_cast<std::size_t>(prev)] == cand) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;
            ctx.candidates[static_cast<std::size_t>(slot)] = cand;
            placed = true;
        }
        if (!placed) {
            throw GenerationError("vocabulary too small to draw " + std::to_string(k) +
                                  " distinct candidates");
        }
    }
    return ctx;
}

/// Partition a seeded shuffle of the holdout into episodes of M contexts
/// (leftover triples are dropped). Episode i is generated from its own
/// stream seeded seed + i, so episodes can be regenerated independently.
inline std::vector<Episode> episode_stream(const HoldoutSplit& split, int k, int m,
                                           double distractor_prob, std::uint64_t seed) {
    if (m < 1) throw ArgumentError("episode length M must be >= 1");
    if (static_cast<std::size_t>(m) > split.holdout.size()) {
        throw ArgumentError("episode length M exceeds holdout size");
    }
    if (!(distractor_prob >= 0.0 && distractor_prob <= 1.0)) {
        throw ArgumentError("distractor probability must be in [0,1]");
    }

    std::vector<Triple> pool = split.holdout;
    SplitMix64 shuffle_rng(seed);
    detail::seeded_shuffle(pool, shuffle_rng);

    const std::size_t count = pool.size() / static_cast<std::size_t>(m);
    std::vector<Episode> episodes;
    episodes.reserve(count);
    for (std::size_t e = 0; e < count; ++e) {
        Episode ep;
        ep.episode_seed = seed + e;
        SplitMix64 rng(ep.episode_seed);
        ep.contexts.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const Triple& truth = pool[e * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
            const bool distractor = rng.next_double() < distractor_prob;
            ep.contexts.push_back(make_context(truth, split.train_graph, k, distractor, rng));
        }
        episodes.push_back(std::move(ep));
    }
    return episodes;
}

/// Flat context stream for evaluation and supervised fitting: cycles the
/// truth list, drawing fresh corruptions each pass.
inline std::vector<CompressedContext> sample_contexts(const std::vector<Triple>& truths,
                                                      std::size_t count, int k,
                                                      double distractor_prob,
                                                      const KnowledgeGraph& graph,
                                                      std::uint64_t seed) {
    if (truths.empty()) throw ArgumentError("cannot sample contexts from an empty truth list");
    if (!(distractor_prob >= 0.0 && distractor_prob <= 1.0)) {
        throw ArgumentError("distractor probability must be in [0,1]");
    }
    SplitMix64 rng(seed);
    std::vector<CompressedContext> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Triple& truth = truths[i % truths.size()];
        const bool distractor = rng.next_double() < distractor_prob;
        out.push_back(make_context(truth, graph, k, distractor, rng));
    }
    return out;
}

/// TSV dump: episode, position, candidates as comma-joined h|r|t, correct
/// index (or "-"), ambiguity kind.
inline void dump_contexts(std::ostream& out, const std::vector<Episode>& episodes) {
    for (std::size_t e = 0; e < episodes.size(); ++e) {
        const auto& contexts = episodes[e].contexts;
        for (std::size_t i = 0; i < contexts.size(); ++i) {
            const auto& ctx = contexts[i];
            out << e << '\t' << i << '\t';
            for (std::size_t c = 0; c < ctx.candidates.size(); ++c) {
                const auto& t = ctx.candidates[c];
                if (c) out << ',';
                out << t.head << '|' << t.relation << '|' << t.tail;
            }
            out << '\t';
            if (ctx.correct_index) {
                out << *ctx.correct_index;
            } else {
                out << '-';
            }
            out << '\t' << to_string(ctx.kind) << '\n';
        }
    }
}

} // namespace kgc
