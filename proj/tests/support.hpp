#pragma once
// Shared fixtures for the unit and acceptance suites.

#include "kgc/graph.hpp"
#include "kgc/rng.hpp"
#include "kgc/triple.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testsupport {

/// Random KG with community structure: entities belong to clusters, each
/// relation lives inside one cluster, and triples stay within it. Clusters
/// end up dense, so real (head, tail) pairs usually share neighbors while
/// cross-cluster corruptions do not — structural features carry signal.
/// Distinct triples, deterministic per seed.
inline std::vector<kgc::Triple> synthetic_triples(int num_entities, int num_relations,
                                                  int num_triples, std::uint64_t seed,
                                                  int num_clusters = 10) {
    kgc::SplitMix64 rng(seed);
    const int per_cluster = num_entities / num_clusters;

    const auto entity_name = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "e%03d", i);
        return std::string(buf);
    };
    const auto relation_name = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "r%02d", i);
        return std::string(buf);
    };

    std::vector<kgc::Triple> out;
    kgc::KnowledgeGraph seen;
    while (static_cast<int>(out.size()) < num_triples) {
        const int r = static_cast<int>(rng.uniform_below(num_relations));
        const int cluster = r % num_clusters;
        const int head = cluster * per_cluster + static_cast<int>(rng.uniform_below(per_cluster));
        const int tail = cluster * per_cluster + static_cast<int>(rng.uniform_below(per_cluster));
        kgc::Triple t{entity_name(head), relation_name(r), entity_name(tail)};
        if (seen.insert(t) == kgc::InsertOutcome::Inserted) out.push_back(std::move(t));
    }
    return out;
}

inline void write_tsv(const std::filesystem::path& path, const std::vector<kgc::Triple>& triples) {
    std::ofstream out(path);
    kgc::write_triples(out, triples);
}

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("kgc_" + label + "_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

// --- 5-state deterministic chain MDP ------------------------------------
//
// States 0..4, actions 0 (left) and 1 (right). Right from state 3 enters the
// terminal state 4 and pays +1; every other move pays 0. Non-terminal states
// 0..3 each have exactly one deterministic transition per action.

inline constexpr int kChainStates = 5;
inline constexpr int kChainActions = 2;

struct ChainStep {
    int s;
    int a;
    double r;
    int s_next;
    bool done;
};

inline ChainStep chain_transition(int s, int a) {
    const int next = a == 1 ? s + 1 : (s > 0 ? s - 1 : 0);
    const bool done = next == kChainStates - 1;
    return ChainStep{s, a, done ? 1.0 : 0.0, next, done};
}

/// One experience per (state, action) pair, a full sweep of the MDP.
inline std::vector<ChainStep> chain_sweep() {
    std::vector<ChainStep> steps;
    for (int s = 0; s + 1 < kChainStates; ++s) {
        for (int a = 0; a < kChainActions; ++a) steps.push_back(chain_transition(s, a));
    }
    return steps;
}

/// Q* by value iteration: repeat Bellman backups to sup-norm tolerance.
/// Independent of the tabular update under test.
inline std::vector<std::vector<double>> chain_q_star(double gamma, double tol = 1e-13) {
    std::vector<std::vector<double>> q(kChainStates - 1,
                                       std::vector<double>(kChainActions, 0.0));
    for (int iter = 0; iter < 100000; ++iter) {
        double delta = 0.0;
        for (int s = 0; s + 1 < kChainStates; ++s) {
            for (int a = 0; a < kChainActions; ++a) {
                const ChainStep t = chain_transition(s, a);
                double backup = t.r;
                if (!t.done) {
                    backup += gamma * std::max(q[static_cast<std::size_t>(t.s_next)][0],
                                               q[static_cast<std::size_t>(t.s_next)][1]);
                }
                delta = std::max(delta, std::abs(backup - q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]));
                q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = backup;
            }
        }
        if (delta < tol) break;
    }
    return q;
}

} // namespace testsupport
