#pragma once
// Scores any decision policy on held-out contexts and emits the three
// report families: integration accuracy, integration time, and KG quality.
//
// Quality is F1 of the integrated triples against the held-out ground
// truth: precision rewards inserting only real facts, recall rewards
// recovering them.

#include "kgc/context.hpp"
#include "kgc/errors.hpp"
#include "kgc/graph.hpp"
#include "kgc/triple.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace kgc {

struct EvalReport {
    std::string policy_name;
    double accuracy = 0.0;
    double wall_seconds = 0.0;
    double quality_index = 0.0;
    std::size_t decisions = 0;
    std::uint64_t seed = 0;
};

struct DecisionPolicy {
    std::string name;
    // sees the current working graph and the pending context
    std::function<int(const KnowledgeGraph&, const CompressedContext&)> choose;
};

/// Fraction of decisions that were right: picked correct_index when present,
/// rejected when absent.
inline double integration_accuracy(const std::vector<int>& actions,
                                   const std::vector<CompressedContext>& contexts) {
    if (actions.empty() || actions.size() != contexts.size()) {
        throw ArgumentError("need one action per context, at least one decision");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const auto& ctx = contexts[i];
        const int reject = static_cast<int>(ctx.candidates.size());
        const int right = ctx.correct_index ? *ctx.correct_index : reject;
        if (actions[i] == right) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(actions.size());
}

/// F1 of integrated triples vs ground truth; 0 when precision+recall is 0.
inline double quality_index(const std::vector<Triple>& integrated,
                            const std::vector<Triple>& ground_truth) {
    if (ground_truth.empty()) throw ArgumentError("ground truth must be non-empty");
    const std::set<Triple> got(integrated.begin(), integrated.end());
    const std::set<Triple> truth(ground_truth.begin(), ground_truth.end());
    std::size_t hits = 0;
    for (const auto& t : got) hits += truth.count(t);
    const double precision = got.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(got.size());
    const double recall = static_cast<double>(hits) / static_cast<double>(truth.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

/// Run a policy over all contexts against a fresh working graph. Correct
/// selections are inserted, wrong ones recorded only, mirroring the
/// training environment. Timed around decisions+insertions, not the
/// initial graph copy.
inline EvalReport timed_evaluate(const DecisionPolicy& policy,
                                 const std::vector<CompressedContext>& contexts,
                                 const KnowledgeGraph& train_graph,
                                 const std::vector<Triple>& ground_truth, std::uint64_t seed) {
    if (contexts.empty()) throw ArgumentError("no contexts to evaluate");
    KnowledgeGraph working = train_graph;
    std::vector<int> actions;
    actions.reserve(contexts.size());
    std::vector<Triple> integrated;

    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& ctx : contexts) {
        const int action = policy.choose(working, ctx);
        actions.push_back(action);
        if (ctx.correct_index && action == *ctx.correct_index) {
            const Triple& t = ctx.candidates[static_cast<std::size_t>(action)];
            if (working.insert(t) == InsertOutcome::Inserted) integrated.push_back(t);
        }
    }
    const auto t1 = std::chrono::steady_clock::now();

    EvalReport report;
    report.policy_name = policy.name;
    report.accuracy = integration_accuracy(actions, contexts);
    report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    report.quality_index = quality_index(integrated, ground_truth);
    report.decisions = contexts.size();
    report.seed = seed;
    return report;
}

// --- report emission ---------------------------------------------------

/// Percentage rounded half-up (away from zero) to one decimal. The nudge
/// keeps decimal boundary cases like 18.75 (inexact in binary) on the
/// half-up side.
inline double round1(double x) {
    const double scaled = x * 10.0 + (x >= 0 ? 1e-9 : -1e-9);
    return static_cast<double>(std::llround(scaled)) / 10.0;
}

/// Absolute percentage-point gap between metrics in [0,1].
inline double improvement_pp(double value, double baseline) {
    return round1((value - baseline) * 100.0);
}

/// Relative improvement in percent.
inline double improvement_rel_pct(double value, double baseline) {
    return round1((value - baseline) / baseline * 100.0);
}

/// Time saved relative to a baseline duration, in percent.
inline double efficiency_gain_pct(double seconds, double baseline_seconds) {
    return round1((baseline_seconds - seconds) / baseline_seconds * 100.0);
}

struct PolicyImprovements {
    std::string policy;
    double acc_pp_over_rule = 0.0;
    double acc_rel_over_rule = 0.0;
    double acc_pp_over_supervised = 0.0;
    double acc_rel_over_supervised = 0.0;
    double quality_pp_over_rule = 0.0;
    double quality_rel_over_rule = 0.0;
    double quality_pp_over_supervised = 0.0;
    double quality_rel_over_supervised = 0.0;
    double eff_gain_over_rule = 0.0;
    double eff_gain_over_supervised = 0.0;
};

struct ReportOutput {
    std::string csv;
    std::string text;
    std::vector<PolicyImprovements> improvements;
};

/// Build the CSV and the three aligned plain-text tables. Improvement
/// columns need "rule-based" and "supervised" rows to be present.
inline ReportOutput emit_report(const std::vector<EvalReport>& reports,
                                bool with_improvements = true) {
    if (reports.empty()) throw ArgumentError("no reports to emit");

    const EvalReport* rule = nullptr;
    const EvalReport* supervised = nullptr;
    for (const auto& r : reports) {
        if (r.policy_name == "rule-based") rule = &r;
        if (r.policy_name == "supervised") supervised = &r;
    }
    if (with_improvements && (!rule || !supervised)) {
        throw ReportError("improvement columns need rule-based and supervised baselines");
    }

    ReportOutput out;
    char buf[256];

    out.csv = "policy,accuracy,wall_seconds,quality_index,"
              "improvement_over_rule_based_pct,improvement_over_supervised_pct\n";
    for (const auto& r : reports) {
        PolicyImprovements imp;
        imp.policy = r.policy_name;
        if (with_improvements) {
            imp.acc_pp_over_rule = improvement_pp(r.accuracy, rule->accuracy);
            imp.acc_rel_over_rule = improvement_rel_pct(r.accuracy, rule->accuracy);
            imp.acc_pp_over_supervised = improvement_pp(r.accuracy, supervised->accuracy);
            imp.acc_rel_over_supervised = improvement_rel_pct(r.accuracy, supervised->accuracy);
            imp.quality_pp_over_rule = improvement_pp(r.quality_index, rule->quality_index);
            imp.quality_rel_over_rule = improvement_rel_pct(r.quality_index, rule->quality_index);
            imp.quality_pp_over_supervised = improvement_pp(r.quality_index, supervised->quality_index);
            imp.quality_rel_over_supervised =
                improvement_rel_pct(r.quality_index, supervised->quality_index);
            imp.eff_gain_over_rule = efficiency_gain_pct(r.wall_seconds, rule->wall_seconds);
            imp.eff_gain_over_supervised =
                efficiency_gain_pct(r.wall_seconds, supervised->wall_seconds);
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.1f,%.1f\n", r.policy_name.c_str(),
                          r.accuracy, r.wall_seconds, r.quality_index, imp.acc_rel_over_rule,
                          imp.acc_rel_over_supervised);
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,,\n", r.policy_name.c_str(),
                          r.accuracy, r.wall_seconds, r.quality_index);
        }
        out.csv += buf;
        out.improvements.push_back(imp);
    }

    const auto imp_cell = [&](double pp, double rel) {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%6.1f pp /%7.1f%%", pp, rel);
        return std::string(cell);
    };

    std::string t;
    t += "Integration Accuracy\n";
    t += "  policy        accuracy   improv. over rule-based   improv. over supervised\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const auto& imp = out.improvements[i];
        std::snprintf(buf, sizeof(buf), "  %-12s %7.1f%%", r.policy_name.c_str(), r.accuracy * 100.0);
        t += buf;
        if (with_improvements) {
            t += "   " + imp_cell(imp.acc_pp_over_rule, imp.acc_rel_over_rule);
            t += "       " + imp_cell(imp.acc_pp_over_supervised, imp.acc_rel_over_supervised);
        }
        t += "\n";
    }
    t += "\nEfficiency in Context Integration\n";
    t += "  policy        seconds    gain over rule-based   gain over supervised\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const auto& imp = out.improvements[i];
        std::snprintf(buf, sizeof(buf), "  %-12s %8.3f", r.policy_name.c_str(), r.wall_seconds);
        t += buf;
        if (with_improvements) {
            std::snprintf(buf, sizeof(buf), "   %7.1f%%              %7.1f%%", imp.eff_gain_over_rule,
                          imp.eff_gain_over_supervised);
            t += buf;
        }
        t += "\n";
    }
    t += "\nKG Quality Index\n";
    t += "  policy        quality    improv. over rule-based   improv. over supervised\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        const auto& imp = out.improvements[i];
        std::snprintf(buf, sizeof(buf), "  %-12s %8.3f", r.policy_name.c_str(), r.quality_index);
        t += buf;
        if (with_improvements) {
            t += "   " + imp_cell(imp.quality_pp_over_rule, imp.quality_rel_over_rule);
            t += "       " + imp_cell(imp.quality_pp_over_supervised, imp.quality_rel_over_supervised);
        }
        t += "\n";
    }
    out.text = std::move(t);
    return out;
}

} // namespace kgc
