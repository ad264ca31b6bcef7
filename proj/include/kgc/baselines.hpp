#pragma once
// The two comparison policies.
//
// Rule-based: score each candidate by neighbor overlap of its endpoints,
// pick the best scorer if any candidate has overlap >= 1, otherwise reject.
//
// Supervised: multinomial logistic regression over the same state encoding
// the DQN sees, fit by full-batch gradient descent on cross-entropy.

#include "kgc/context.hpp"
#include "kgc/errors.hpp"
#include "kgc/graph.hpp"
#include "kgc/qnet.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <utility>
#include <vector>

namespace kgc {

struct LinearModel {
    int num_classes = 0;
    int dim = 0;
    std::vector<double> weights; // num_classes x dim, row-major
    std::vector<double> bias;    // num_classes

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Pick the candidate with the highest endpoint neighbor overlap (ties to
/// the lowest index); reject when no candidate scores >= 1.
inline int rule_based_choose(const KnowledgeGraph& graph, const CompressedContext& ctx) {
    const int k = static_cast<int>(ctx.candidates.size());
    int best = -1;
    std::size_t best_score = 0;
    for (int i = 0; i < k; ++i) {
        const Triple& c = ctx.candidates[static_cast<std::size_t>(i)];
        const std::size_t score = graph.neighbor_overlap(c.head, c.tail);
        if (score >= 1 && (best < 0 || score > best_score)) {
            best = i;
            best_score = score;
        }
    }
    return best < 0 ? k : best;
}

namespace detail {

inline std::vector<double> class_scores(const LinearModel& m, const std::vector<double>& s) {
    std::vector<double> scores(static_cast<std::size_t>(m.num_classes));
    for (int c = 0; c < m.num_classes; ++c) {
        const double* w = m.weights.data() + static_cast<std::size_t>(c) * m.dim;
        double z = m.bias[static_cast<std::size_t>(c)];
        for (int j = 0; j < m.dim; ++j) z += w[j] * s[static_cast<std::size_t>(j)];
        scores[static_cast<std::size_t>(c)] = z;
    }
    return scores;
}

inline void softmax_inplace(std::vector<double>& z) {
    double zmax = z[0];
    for (double v : z) zmax = std::max(zmax, v);
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

} // namespace detail

/// Multinomial logistic regression via full-batch gradient descent on
/// cross-entropy, zero-initialized. The seed is kept for interface symmetry
/// with the other trainers; full-batch updates consume no randomness.
inline LinearModel fit_supervised(const std::vector<std::pair<std::vector<double>, int>>& examples,
                                  int num_classes, int epochs, double learning_rate,
                                  std::uint64_t seed) {
    (void)seed;
    if (examples.empty()) throw ArgumentError("no supervised examples");
    if (num_classes < 2) throw ArgumentError("need at least two classes");
    const int dim = static_cast<int>(examples.front().first.size());
    for (const auto& [s, label] : examples) {
        if (static_cast<int>(s.size()) != dim) throw ArgumentError("inconsistent feature dimensions");
        if (label < 0 || label >= num_classes) throw ArgumentError("label out of range");
    }

    LinearModel m;
    m.num_classes = num_classes;
    m.dim = dim;
    m.weights.assign(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(dim), 0.0);
    m.bias.assign(static_cast<std::size_t>(num_classes), 0.0);

    std::vector<double> grad_w(m.weights.size());
    std::vector<double> grad_b(m.bias.size());
    const double inv_n = 1.0 / static_cast<double>(examples.size());

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        std::fill(grad_b.begin(), grad_b.end(), 0.0);
        for (const auto& [s, label] : examples) {
            std::vector<double> p = detail::class_scores(m, s);
            detail::softmax_inplace(p);
            p[static_cast<std::size_t>(label)] -= 1.0; // dL/dz = p - onehot
            for (int c = 0; c < num_classes; ++c) {
                const double d = p[static_cast<std::size_t>(c)];
                if (d == 0.0) continue;
                double* gw = grad_w.data() + static_cast<std::size_t>(c) * dim;
                for (int j = 0; j < dim; ++j) gw[j] += d * s[static_cast<std::size_t>(j)];
                grad_b[static_cast<std::size_t>(c)] += d;
            }
        }
        for (std::size_t i = 0; i < m.weights.size(); ++i) {
            m.weights[i] -= learning_rate * inv_n * grad_w[i];
        }
        for (std::size_t i = 0; i < m.bias.size(); ++i) {
            m.bias[i] -= learning_rate * inv_n * grad_b[i];
        }
    }
    return m;
}

/// Argmax of W*s + b, ties to the lowest index.
inline int supervised_choose(const LinearModel& m, const std::vector<double>& s) {
    if (static_cast<int>(s.size()) != m.dim) throw ArgumentError("feature dimension mismatch");
    const std::vector<double> scores = detail::class_scores(m, s);
    int best = 0;
    for (int c = 1; c < m.num_classes; ++c) {
        if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

/// Same line-oriented text format as the Q-network checkpoints, header
/// "linmodel v1", dims line "dim num_classes".
inline void save_linear_model(const LinearModel& m, std::ostream& out) {
    detail::write_params(out, "linmodel v1", {m.dim, m.num_classes}, {m.weights}, {m.bias});
}

inline void save_linear_model(const LinearModel& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    save_linear_model(m, out);
    if (!out) throw IoError("failed writing " + path.string());
}

inline LinearModel load_linear_model(std::istream& in) {
    const std::vector<int> dims = detail::read_header(in, "linmodel v1");
    if (dims.size() != 2) throw CheckpointError("linmodel v1: expected exactly 2 dims");
    LinearModel m;
    m.dim = dims[0];
    m.num_classes = dims[1];
    m.weights.resize(static_cast<std::size_t>(m.dim) * static_cast<std::size_t>(m.num_classes));
    for (double& v : m.weights) v = detail::read_value(in, "linmodel v1");
    m.bias.resize(static_cast<std::size_t>(m.num_classes));
    for (double& v : m.bias) v = detail::read_value(in, "linmodel v1");
    detail::expect_eof(in, "linmodel v1");
    return m;
}

inline LinearModel load_linear_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return load_linear_model(in);
}

} // namespace kgc
