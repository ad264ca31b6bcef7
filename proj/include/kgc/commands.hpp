#pragma once
// Subcommand implementations behind the kgc binary: prepare, train,
// compare, inspect. Each is callable as a plain function so tests can run
// the full pipeline in-process.
//
// Artifact layout under output_dir:
//   resolved.cfg    canonical copy of the effective configuration
//   train.tsv       train graph, sorted TSV
//   holdout.tsv     held-out triples, removal order
//   contexts.tsv    dump of the training episodes' contexts
//   manifest.txt    seed and counts
//   qnet.ckpt       trained network        (train)
//   train_log.csv   per-step training log  (train)
//   compare.csv/.txt                       (compare)
//
// Sub-seeds are all derived from the run seed by tag, so prepare, train,
// and compare agree on shared artifacts without passing state around.

#include "kgc/agent.hpp"
#include "kgc/baselines.hpp"
#include "kgc/config.hpp"
#include "kgc/context.hpp"
#include "kgc/encoder.hpp"
#include "kgc/env.hpp"
#include "kgc/errors.hpp"
#include "kgc/eval.hpp"
#include "kgc/graph.hpp"
#include "kgc/qnet.hpp"
#include "kgc/rng.hpp"
#include "kgc/triple.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace kgc {

inline constexpr int kDefaultHidden[] = {64, 64};

namespace detail {

inline std::vector<Triple> read_triple_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_triples(in);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Rebuild the holdout split from the prepare artifacts.
inline HoldoutSplit load_split(const RunConfig& cfg) {
    const std::filesystem::path dir = cfg.output_dir;
    HoldoutSplit split;
    split.train_graph = build_graph(read_triple_file(dir / "train.tsv"));
    split.holdout = read_triple_file(dir / "holdout.tsv");
    split.seed = derive_seed(cfg.seed, "split");
    return split;
}

inline std::vector<int> qnet_dims(const RunConfig& cfg) {
    std::vector<int> dims;
    dims.push_back(cfg.encoder.state_dim());
    for (int h : kDefaultHidden) dims.push_back(h);
    dims.push_back(action_count(cfg.k));
    return dims;
}

/// Supervised fit slice and evaluation slice: first and second half of a
/// seeded shuffle of the holdout, disjoint by construction.
inline std::pair<std::vector<Triple>, std::vector<Triple>> slice_holdout(const RunConfig& cfg,
                                                                         std::vector<Triple> holdout) {
    SplitMix64 rng(derive_seed(cfg.seed, "slice"));
    detail::seeded_shuffle(holdout, rng);
    const std::size_t fit_count = (holdout.size() + 1) / 2;
    std::vector<Triple> fit(holdout.begin(), holdout.begin() + static_cast<long>(fit_count));
    std::vector<Triple> eval(holdout.begin() + static_cast<long>(fit_count), holdout.end());
    return {std::move(fit), std::move(eval)};
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Split the dataset and write all prepare artifacts. The manifest's
/// train + holdout counts always sum to the distinct input triples.
inline int cmd_prepare(const RunConfig& cfg) {
    if (cfg.dataset_path.empty()) throw ConfigError("dataset_path is required");
    const std::vector<Triple> input = detail::read_triple_file(cfg.dataset_path);
    const KnowledgeGraph graph = build_graph(input);
    const HoldoutSplit split = split_holdout(graph, cfg.holdout_fraction, derive_seed(cfg.seed, "split"));
    const std::vector<Episode> episodes =
        episode_stream(split, cfg.k, cfg.m, cfg.distractor_prob, derive_seed(cfg.seed, "episodes"));

    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "resolved.cfg", serialize_config(cfg));
    detail::write_file(dir / "train.tsv", split.train_graph.serialize());
    detail::write_file(dir / "holdout.tsv", serialize_triples(split.holdout));
    {
        std::ostringstream ctx_out;
        dump_contexts(ctx_out, episodes);
        detail::write_file(dir / "contexts.tsv", ctx_out.str());
    }
    {
        std::ostringstream m;
        m << "dataset_path=" << cfg.dataset_path << '\n'
          << "seed=" << cfg.seed << '\n'
          << "triples_input=" << input.size() << '\n'
          << "triples_distinct=" << graph.num_triples() << '\n'
          << "triples_train=" << split.train_graph.num_triples() << '\n'
          << "triples_holdout=" << split.holdout.size() << '\n'
          << "entities=" << graph.num_entities() << '\n'
          << "relations=" << graph.num_relations() << '\n'
          << "episodes=" << episodes.size() << '\n';
        detail::write_file(dir / "manifest.txt", m.str());
    }
    std::cout << "prepared " << split.train_graph.num_triples() << " train / "
              << split.holdout.size() << " holdout triples, " << episodes.size() << " episodes -> "
              << dir.string() << '\n';
    return 0;
}

/// Episode source for training: each full pass over the holdout regenerates
/// its contexts from a pass-derived seed, so a truth keeps meeting fresh
/// corruptions instead of one frozen candidate set. Pass 0 matches the
/// contexts.tsv dump written by prepare. `split` must outlive the source.
inline EpisodeSource training_episode_source(const HoldoutSplit& split, const RunConfig& cfg) {
    const std::size_t per_pass = split.holdout.size() / static_cast<std::size_t>(cfg.m);
    const std::uint64_t base_seed = derive_seed(cfg.seed, "episodes");
    auto cache = std::make_shared<std::pair<std::size_t, std::vector<Episode>>>(
        0, episode_stream(split, cfg.k, cfg.m, cfg.distractor_prob, base_seed));
    return [&split, cfg, per_pass, base_seed, cache](std::size_t ordinal) {
        const std::size_t pass = ordinal / per_pass;
        if (cache->first != pass) {
            cache->second = episode_stream(split, cfg.k, cfg.m, cfg.distractor_prob,
                                           base_seed + 0x10001ull * pass);
            cache->first = pass;
        }
        return cache->second[ordinal % per_pass];
    };
}

/// Train the DQN on the prepared split and write checkpoint plus log.
inline int cmd_train(const RunConfig& cfg) {
    const HoldoutSplit split = detail::load_split(cfg);
    QNetwork net = init_network(detail::qnet_dims(cfg), derive_seed(cfg.agent.seed, "init"));
    Environment env(split.train_graph, cfg.encoder);
    TrainResult result = train(env, training_episode_source(split, cfg), cfg.agent, std::move(net));

    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "resolved.cfg", serialize_config(cfg));
    save_checkpoint(result.net, dir / "qnet.ckpt");
    {
        std::ostringstream log_out;
        write_training_log(log_out, result.log);
        detail::write_file(dir / "train_log.csv", log_out.str());
    }
    const double acc = greedy_accuracy(result.greedy_hit);
    std::cout << "trained " << cfg.agent.total_steps << " steps, final greedy accuracy "
              << acc << '\n';
    return 0;
}

/// Evaluate random, rule-based, supervised, and DQN policies on the same
/// seeded evaluation contexts; write CSV and print the tables.
inline int cmd_compare(const RunConfig& cfg) {
    const HoldoutSplit split = detail::load_split(cfg);
    const QNetwork net = load_checkpoint(std::filesystem::path(cfg.output_dir) / "qnet.ckpt");
    if (net.input_dim() != cfg.encoder.state_dim() || net.output_dim() != action_count(cfg.k)) {
        throw ConfigError("checkpoint dimensions do not match configuration");
    }

    auto [fit_slice, eval_slice] = detail::slice_holdout(cfg, split.holdout);
    if (fit_slice.empty() || eval_slice.empty()) {
        throw ConfigError("holdout too small to slice for supervised fitting and evaluation");
    }

    // supervised baseline: labeled contexts from the fit slice only
    const std::vector<CompressedContext> fit_contexts =
        sample_contexts(fit_slice, cfg.eval_contexts, cfg.k, cfg.distractor_prob, split.train_graph,
                        derive_seed(cfg.seed, "sup-ctx"));
    std::vector<std::pair<std::vector<double>, int>> examples;
    examples.reserve(fit_contexts.size());
    for (const auto& ctx : fit_contexts) {
        examples.emplace_back(encode_state(split.train_graph, ctx, cfg.encoder),
                              ctx.correct_index ? *ctx.correct_index : cfg.k);
    }
    const LinearModel model =
        fit_supervised(examples, action_count(cfg.k), cfg.baseline.supervised_epochs,
                       cfg.baseline.supervised_lr, derive_seed(cfg.seed, "sup-fit"));

    const std::uint64_t eval_seed = derive_seed(cfg.seed, "eval-ctx");
    const std::vector<CompressedContext> eval_contexts = sample_contexts(
        eval_slice, cfg.eval_contexts, cfg.k, cfg.distractor_prob, split.train_graph, eval_seed);

    const EncoderConfig enc = cfg.encoder;
    const auto make_policies = [&]() {
        std::vector<DecisionPolicy> policies;
        auto rng = std::make_shared<SplitMix64>(derive_seed(cfg.seed, "random-policy"));
        policies.push_back({"random", [rng, k = cfg.k](const KnowledgeGraph&, const CompressedContext&) {
                                return static_cast<int>(rng->uniform_below(
                                    static_cast<std::uint64_t>(action_count(k))));
                            }});
        policies.push_back({"rule-based", rule_based_choose});
        policies.push_back({"supervised", [&model, enc](const KnowledgeGraph& g, const CompressedContext& ctx) {
                                return supervised_choose(model, encode_state(g, ctx, enc));
                            }});
        policies.push_back({"dqn", [&net, enc](const KnowledgeGraph& g, const CompressedContext& ctx) {
                                return argmax_action(forward(net, encode_state(g, ctx, enc)));
                            }});
        return policies;
    };

    std::vector<EvalReport> reports;
    for (std::size_t p = 0; p < 4; ++p) {
        std::vector<double> timings;
        EvalReport report;
        for (int rep = 0; rep < cfg.eval_repeat; ++rep) {
            // policies rebuilt per repeat so the random policy replays the
            // same decision sequence and only the timing varies
            const DecisionPolicy policy = make_policies()[p];
            EvalReport r = timed_evaluate(policy, eval_contexts, split.train_graph, eval_slice, eval_seed);
            timings.push_back(r.wall_seconds);
            if (rep == 0) report = std::move(r);
        }
        report.wall_seconds = detail::median(std::move(timings));
        reports.push_back(std::move(report));
    }

    const ReportOutput out = emit_report(reports);
    const std::filesystem::path dir = cfg.output_dir;
    detail::write_file(dir / "compare.csv", out.csv);
    detail::write_file(dir / "compare.txt", out.text);
    std::cout << out.text;
    return 0;
}

/// Print a type-appropriate summary of any artifact.
inline int cmd_inspect(const std::filesystem::path& path) {
    std::ifstream probe(path);
    if (!probe) {
        std::cerr << "error: cannot open " << path.string() << '\n';
        return 2;
    }
    std::string first_line;
    std::getline(probe, first_line);
    if (!first_line.empty() && first_line.back() == '\r') first_line.pop_back();
    probe.close();

    if (first_line == "qnet v1") {
        const QNetwork net = load_checkpoint(path);
        std::cout << "qnet checkpoint, layer dims:";
        for (int d : net.layer_dims) std::cout << ' ' << d;
        std::size_t params = 0;
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            params += net.weights[l].size() + net.biases[l].size();
        }
        std::cout << " (" << params << " parameters)\n";
        return 0;
    }
    if (first_line == "linmodel v1") {
        const LinearModel m = load_linear_model(path);
        std::cout << "linear model, " << m.num_classes << " classes x " << m.dim << " features\n";
        return 0;
    }
    if (first_line.rfind("step,epsilon,", 0) == 0) {
        std::ifstream in(path);
        std::string line, last;
        std::getline(in, line); // header
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            if (!line.empty()) {
                last = line;
                ++rows;
            }
        }
        std::cout << "training log, " << rows << " steps";
        if (!last.empty()) std::cout << ", last row: " << last;
        std::cout << '\n';
        return 0;
    }
    try {
        std::ifstream in(path);
        const std::vector<Triple> triples = parse_triples(in);
        const KnowledgeGraph g = build_graph(triples);
        std::cout << "triple file, " << triples.size() << " triples (" << g.num_triples()
                  << " distinct), " << g.num_entities() << " entities, " << g.num_relations()
                  << " relations\n";
        return 0;
    } catch (const ParseError&) {
        std::cerr << "error: unrecognized artifact format: " << path.string() << '\n';
        return 2;
    }
}

} // namespace kgc
