#pragma once
// Fixed-size state vectors for the Q-network.
//
// Token embeddings are deterministic hash-seeded unit vectors, not trained:
// generator seed = fnv1a64(hash_seed, token), components uniform in [-1,1),
// then normalized. Same token, same vector, on every platform.
//
// encode_state layout (d_state = 4 + K*(3*d_embed + 3)):
//   [0..3]               log1p(#entities), log1p(#relations), log1p(#triples), mean degree
//   per candidate i:     head embedding | relation embedding | tail embedding
//                        | log1p(degree(head)) | log1p(degree(tail))
//                        | log1p(neighbor_overlap(head, tail))

#include "kgc/context.hpp"
#include "kgc/errors.hpp"
#include "kgc/graph.hpp"
#include "kgc/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace kgc {

struct EncoderConfig {
    int d_embed = 8;
    std::uint64_t hash_seed = 0;
    int num_candidates = 5; // must equal the action-space K

    int state_dim() const { return 4 + num_candidates * (3 * d_embed + 3); }
};

/// Deterministic unit-norm embedding of a token.
inline std::vector<double> encode_token(std::string_view token, const EncoderConfig& cfg) {
    SplitMix64 rng(fnv1a64(cfg.hash_seed, token));
    std::vector<double> v(static_cast<std::size_t>(cfg.d_embed));
    double norm_sq = 0.0;
    for (double& x : v) {
        x = 2.0 * rng.next_double() - 1.0;
        norm_sq += x * x;
    }
    if (norm_sq < 1e-300) {
        v[0] = 1.0; // all-zero draw; astronomically unlikely
        norm_sq = 1.0;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
}

inline std::vector<double> encode_state(const KnowledgeGraph& graph, const CompressedContext& ctx,
                                        const EncoderConfig& cfg) {
    if (static_cast<int>(ctx.candidates.size()) != cfg.num_candidates) {
        throw ArgumentError("context has " + std::to_string(ctx.candidates.size()) +
                            " candidates, encoder configured for " +
                            std::to_string(cfg.num_candidates));
    }
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(cfg.state_dim()));
    s.push_back(std::log1p(static_cast<double>(graph.num_entities())));
    s.push_back(std::log1p(static_cast<double>(graph.num_relations())));
    s.push_back(std::log1p(static_cast<double>(graph.num_triples())));
    s.push_back(graph.mean_degree());
    for (const Triple& cand : ctx.candidates) {
        for (double x : encode_token(cand.head, cfg)) s.push_back(x);
        for (double x : encode_token(cand.relation, cfg)) s.push_back(x);
        for (double x : encode_token(cand.tail, cfg)) s.push_back(x);
        s.push_back(std::log1p(static_cast<double>(graph.degree(cand.head))));
        s.push_back(std::log1p(static_cast<double>(graph.degree(cand.tail))));
        s.push_back(std::log1p(static_cast<double>(graph.neighbor_overlap(cand.head, cand.tail))));
    }
    return s;
}

} // namespace kgc
