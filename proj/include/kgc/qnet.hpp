#pragma once
// Multilayer perceptron Q(s, a; theta): affine + ReLU hidden layers, affine
// output, 64-bit floats throughout. Forward and backward passes are written
// out by hand; the squared TD-error loss routes gradient only through the
// chosen action's output.
//
// Checkpoints are line-oriented text: "qnet v1", the layer dims, then every
// weight (row-major) and bias per layer, one %.17g value per line. That is
// round-trip exact for doubles and diffs cleanly.

#include "kgc/errors.hpp"
#include "kgc/rng.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace kgc {

struct QNetwork {
    std::vector<int> layer_dims;               // [d_state, h1, ..., A_count]
    std::vector<std::vector<double>> weights;  // [l]: dims[l+1] x dims[l], row-major
    std::vector<std::vector<double>> biases;   // [l]: dims[l+1]

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    std::size_t num_layers() const { return weights.size(); }

    friend bool operator==(const QNetwork&, const QNetwork&) = default;
};

// Frozen copy theta^-; value semantics make the isolation literal.
using TargetParams = QNetwork;

struct GradientSet {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/// Zeroed gradients shaped like `net`.
inline GradientSet make_gradients(const QNetwork& net) {
    GradientSet g;
    g.weights.reserve(net.weights.size());
    g.biases.reserve(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.emplace_back(net.weights[l].size(), 0.0);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

/// Uniform init in +-sqrt(6/(fan_in+fan_out)), biases zero, deterministic
/// per seed. Draw order: per layer, weights row-major.
inline QNetwork init_network(const std::vector<int>& layer_dims, std::uint64_t seed) {
    if (layer_dims.size() < 2) throw ArgumentError("network needs at least input and output dims");
    for (int d : layer_dims) {
        if (d < 1) throw ArgumentError("layer dims must be positive");
    }
    QNetwork net;
    net.layer_dims = layer_dims;
    SplitMix64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::vector<double> w(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
        for (double& x : w) x = bound * (2.0 * rng.next_double() - 1.0);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
    }
    return net;
}

/// Q-values for all actions.
inline std::vector<double> forward(const QNetwork& net, const std::vector<double>& state) {
    if (static_cast<int>(state.size()) != net.input_dim()) {
        throw ArgumentError("state dimension " + std::to_string(state.size()) +
                            " does not match network input " + std::to_string(net.input_dim()));
    }
    std::vector<double> act = state;
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const int rows = net.layer_dims[l + 1];
        const int cols = net.layer_dims[l];
        const bool hidden = l + 1 < net.num_layers();
        std::vector<double> next(static_cast<std::size_t>(rows));
        for (int i = 0; i < rows; ++i) {
            const double* w = net.weights[l].data() + static_cast<std::size_t>(i) * cols;
            double z = net.biases[l][static_cast<std::size_t>(i)];
            for (int j = 0; j < cols; ++j) z += w[j] * act[static_cast<std::size_t>(j)];
            next[static_cast<std::size_t>(i)] = hidden && z < 0.0 ? 0.0 : z;
        }
        act = std::move(next);
    }
    return act;
}

namespace detail {

/// Backprop of L = (td_target - Q(s,a))^2, accumulating into `grads`.
/// Returns the loss.
inline double accumulate_loss_gradient(const QNetwork& net, const std::vector<double>& state,
                                       int action, double td_target, GradientSet& grads) {
    if (static_cast<int>(state.size()) != net.input_dim()) {
        throw ArgumentError("state dimension does not match network input");
    }
    if (action < 0 || action >= net.output_dim()) {
        throw ArgumentError("action index out of range for network output");
    }

    const std::size_t layers = net.num_layers();
    std::vector<std::vector<double>> acts(layers + 1);  // post-activation per layer
    std::vector<std::vector<double>> pre(layers);       // pre-activation per layer
    acts[0] = state;
    for (std::size_t l = 0; l < layers; ++l) {
        const int rows = net.layer_dims[l + 1];
        const int cols = net.layer_dims[l];
        const bool hidden = l + 1 < layers;
        pre[l].resize(static_cast<std::size_t>(rows));
        acts[l + 1].resize(static_cast<std::size_t>(rows));
        for (int i = 0; i < rows; ++i) {
            const double* w = net.weights[l].data() + static_cast<std::size_t>(i) * cols;
            double z = net.biases[l][static_cast<std::size_t>(i)];
            for (int j = 0; j < cols; ++j) z += w[j] * acts[l][static_cast<std::size_t>(j)];
            pre[l][static_cast<std::size_t>(i)] = z;
            acts[l + 1][static_cast<std::size_t>(i)] = hidden && z < 0.0 ? 0.0 : z;
        }
    }

    const double q = acts[layers][static_cast<std::size_t>(action)];
    const double diff = td_target - q;
    const double loss = diff * diff;

    std::vector<double> delta(static_cast<std::size_t>(net.output_dim()), 0.0);
    delta[static_cast<std::size_t>(action)] = -2.0 * diff;

    for (std::size_t l = layers; l-- > 0;) {
        const int rows = net.layer_dims[l + 1];
        const int cols = net.layer_dims[l];
        for (int i = 0; i < rows; ++i) {
            const double d = delta[static_cast<std::size_t>(i)];
            if (d == 0.0) continue;
            double* gw = grads.weights[l].data() + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) gw[j] += d * acts[l][static_cast<std::size_t>(j)];
            grads.biases[l][static_cast<std::size_t>(i)] += d;
        }
        if (l == 0) break;
        std::vector<double> prev(static_cast<std::size_t>(cols), 0.0);
        for (int i = 0; i < rows; ++i) {
            const double d = delta[static_cast<std::size_t>(i)];
            if (d == 0.0) continue;
            const double* w = net.weights[l].data() + static_cast<std::size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) prev[static_cast<std::size_t>(j)] += w[j] * d;
        }
        for (int j = 0; j < cols; ++j) {
            if (pre[l - 1][static_cast<std::size_t>(j)] <= 0.0) prev[static_cast<std::size_t>(j)] = 0.0;
        }
        delta = std::move(prev);
    }
    return loss;
}

} // namespace detail

/// Loss and analytic gradient of the squared TD error for one sample.
inline std::pair<double, GradientSet> loss_and_gradient(const QNetwork& net,
                                                        const std::vector<double>& state, int action,
                                                        double td_target) {
    GradientSet grads = make_gradients(net);
    const double loss = detail::accumulate_loss_gradient(net, state, action, td_target, grads);
    return {loss, std::move(grads)};
}

/// One SGD step: theta <- theta - lr * grads.
inline void apply_gradients(QNetwork& net, const GradientSet& grads, double learning_rate) {
    if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
    if (grads.weights.size() != net.weights.size() || grads.biases.size() != net.biases.size()) {
        throw ArgumentError("gradient shape does not match network");
    }
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        if (grads.weights[l].size() != net.weights[l].size() ||
            grads.biases[l].size() != net.biases[l].size()) {
            throw ArgumentError("gradient shape does not match network");
        }
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
            net.weights[l][i] -= learning_rate * grads.weights[l][i];
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            net.biases[l][i] -= learning_rate * grads.biases[l][i];
        }
    }
}

/// Frozen parameter copy; later updates to `net` cannot touch it.
inline TargetParams sync_target(const QNetwork& net) { return net; }

namespace detail {

inline void write_value(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << '\n';
}

inline void write_params(std::ostream& out, const char* magic, const std::vector<int>& dims,
                         const std::vector<std::vector<double>>& weights,
                         const std::vector<std::vector<double>>& biases) {
    out << magic << '\n';
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) out << ' ';
        out << dims[i];
    }
    out << '\n';
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (double v : weights[l]) write_value(out, v);
        for (double v : biases[l]) write_value(out, v);
    }
}

inline double read_value(std::istream& in, const char* magic) {
    double v;
    if (!(in >> v)) throw CheckpointError(std::string(magic) + ": truncated or malformed value");
    if (!std::isfinite(v)) throw CheckpointError(std::string(magic) + ": non-finite parameter");
    return v;
}

inline std::vector<int> read_header(std::istream& in, const char* magic) {
    std::string line;
    if (!std::getline(in, line)) throw CheckpointError("empty checkpoint");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != magic) {
        throw CheckpointError("bad checkpoint header: expected \"" + std::string(magic) + "\"");
    }
    if (!std::getline(in, line)) throw CheckpointError(std::string(magic) + ": missing dims line");
    std::istringstream dims_in(line);
    std::vector<int> dims;
    int d;
    while (dims_in >> d) dims.push_back(d);
    if (!dims_in.eof()) throw CheckpointError(std::string(magic) + ": malformed dims line");
    if (dims.size() < 2) throw CheckpointError(std::string(magic) + ": need at least 2 layer dims");
    for (int dim : dims) {
        if (dim < 1) throw CheckpointError(std::string(magic) + ": non-positive layer dim");
    }
    return dims;
}

inline void expect_eof(std::istream& in, const char* magic) {
    std::string extra;
    if (in >> extra) throw CheckpointError(std::string(magic) + ": trailing data after parameters");
}

} // namespace detail

inline void save_checkpoint(const QNetwork& net, std::ostream& out) {
    detail::write_params(out, "qnet v1", net.layer_dims, net.weights, net.biases);
}

inline void save_checkpoint(const QNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    save_checkpoint(net, out);
    if (!out) throw IoError("failed writing " + path.string());
}

inline QNetwork load_checkpoint(std::istream& in) {
    QNetwork net;
    net.layer_dims = detail::read_header(in, "qnet v1");
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
        const std::size_t rows = static_cast<std::size_t>(net.layer_dims[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(net.layer_dims[l]);
        std::vector<double> w(rows * cols);
        for (double& v : w) v = detail::read_value(in, "qnet v1");
        std::vector<double> b(rows);
        for (double& v : b) v = detail::read_value(in, "qnet v1");
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    detail::expect_eof(in, "qnet v1");
    return net;
}

inline QNetwork load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return load_checkpoint(in);
}

} // namespace kgc
