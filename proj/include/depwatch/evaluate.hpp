#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "depwatch/confusion.hpp"
#include "depwatch/effort.hpp"
#include "depwatch/render.hpp"
#include "depwatch/scan.hpp"
#include "depwatch/synth.hpp"

namespace depwatch {

/// Scan results scored against known labels.
///
/// Binary matrices use class 0 for the favourable side (unsuspicious, maintained) and 1 for
/// the other. "Maintained" means Active or FeatureComplete.
struct Evaluation {
    Report report;
    LabelConfusion labels;
    Confusion<2> suspicion;
    Confusion<2> maintained;
    EffortMetrics effort;
};

inline bool is_maintained(MaintenanceLabel l) {
    return l == MaintenanceLabel::Active || l == MaintenanceLabel::FeatureComplete;
}

/// Scores a finished scan. Truth verdicts come from the same all-or-nothing rule applied to
/// the true labels on the scanned graph.
inline Evaluation score_scan(const ScanResult& scan, const GroundTruth& truth, const VerdictOptions& options = {},
                             std::optional<double> cost_per_review = {}) {
    Evaluation ev;
    ev.report = scan.report;
    std::map<LibraryId, MaintenanceLabel> true_labels;
    for (const auto& id : scan.graph.nodes()) {
        const auto it = truth.labels.find(id);
        if (it == truth.labels.end()) throw ValidationError("ground truth has no label for " + id.str());
        true_labels[id] = it->second;
    }
    std::vector<SuspicionVerdict> true_verdicts;
    if (!scan.graph.empty()) {
        NodeScores zero;
        zero.values.assign(scan.graph.size(), 0.0);
        true_verdicts = aggregate_verdicts(scan.graph, true_labels, zero, options);
    }
    std::size_t true_suspicious = 0, true_positives = 0;
    for (std::size_t i = 0; i < scan.report.entries.size(); ++i) {
        const auto& e = scan.report.entries[i];
        const auto t = true_labels.at(e.id);
        ev.labels.add(label_index(t), label_index(e.label));
        ev.maintained.add(is_maintained(t) ? 0 : 1, is_maintained(e.label) ? 0 : 1);
        const bool truly = true_verdicts[i].verdict == Verdict::Suspicious;
        const bool reported = e.verdict == Verdict::Suspicious;
        ev.suspicion.add(truly ? 1 : 0, reported ? 1 : 0);
        true_suspicious += truly;
        true_positives += truly && reported;
    }
    ev.effort = effort_metrics(scan.report.entries.size(), scan.report.summary.suspicious,
                               EffortTruth{true_suspicious, true_positives}, cost_per_review);
    ev.report.summary.effort = ev.effort;
    return ev;
}

inline Evaluation evaluate(const ScanConfig& config, const GroundTruth& truth) {
    ScanConfig c = config;
    if (!c.as_of) c.as_of = truth.as_of;
    return score_scan(scan(c), truth, c.verdict, c.cost_per_review_hours);
}

template <std::size_t N>
nlohmann::json confusion_to_json(const Confusion<N>& m, const std::array<std::string_view, N>& names) {
    nlohmann::json matrix = nlohmann::json::array(), per_class = nlohmann::json::object();
    for (std::size_t r = 0; r < N; ++r) {
        matrix.push_back(m.counts[r]);
        per_class[std::string(names[r])] = {{"precision", m.precision(r)},
                                            {"recall", m.recall(r)},
                                            {"f1", m.f1(r)},
                                            {"support", m.support(r)}};
    }
    nlohmann::json classes = nlohmann::json::array();
    for (auto n : names) classes.push_back(n);
    return {{"classes", classes},
            {"matrix", matrix},
            {"per_class", per_class},
            {"accuracy", m.accuracy()},
            {"macro_f1", m.macro_f1()}};
}

/// `binary_only` keeps just the maintained-vs-not and suspicious-vs-not sections.
inline nlohmann::json evaluation_to_json(const Evaluation& ev, bool binary_only = false) {
    std::array<std::string_view, kLabelCount> names{};
    for (auto l : kAllLabels) names[label_index(l)] = label_name(l);
    nlohmann::json j = {
        {"as_of", format_date(ev.report.as_of)},
        {"classifier", ev.report.classifier},
        {"effort", effort_to_json(ev.effort)},
        {"suspicion", confusion_to_json<2>(ev.suspicion, {"unsuspicious", "suspicious"})},
        {"maintained", confusion_to_json<2>(ev.maintained, {"maintained", "not_maintained"})},
    };
    if (!binary_only) j["labels"] = confusion_to_json(ev.labels, names);
    return j;
}

} // namespace depwatch
