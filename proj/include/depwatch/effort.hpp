#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "depwatch/error.hpp"

namespace depwatch {

/// Ground truth for an evaluation run.
struct EffortTruth {
    std::size_t true_suspicious = 0;
    std::size_t true_positives = 0;
};

/// How much manual review a report saves, and (with ground truth) how much it misses.
struct EffortMetrics {
    std::size_t total = 0;
    std::size_t reported = 0;
    std::optional<EffortTruth> truth;
    /// 1 - reported / total; 1 for an empty scan.
    double effort_reduction = 1.0;
    std::optional<double> recall;
    std::optional<double> precision;
    /// Review cost per library when a cost multiplier is configured.
    std::optional<double> cost_per_review;
    std::optional<double> manual_review_cost;
    std::optional<double> tool_review_cost;
    std::optional<double> review_cost_saved;
};

/// Recall is 1 when nothing is truly suspicious; precision is 1 when nothing is reported.
inline EffortMetrics effort_metrics(std::size_t total, std::size_t reported, std::optional<EffortTruth> truth = {},
                                    std::optional<double> cost_per_review = {}) {
    if (reported > total) {
        throw ValidationError("reported (" + std::to_string(reported) + ") exceeds total (" + std::to_string(total) + ")");
    }
    EffortMetrics m;
    m.total = total;
    m.reported = reported;
    if (total > 0) m.effort_reduction = 1.0 - static_cast<double>(reported) / static_cast<double>(total);
    if (truth) {
        if (truth->true_suspicious > total) throw ValidationError("true_suspicious exceeds total");
        if (truth->true_positives > reported || truth->true_positives > truth->true_suspicious) {
            throw ValidationError("true_positives exceeds reported or true_suspicious");
        }
        m.truth = truth;
        m.recall = truth->true_suspicious == 0
                       ? 1.0
                       : static_cast<double>(truth->true_positives) / static_cast<double>(truth->true_suspicious);
        m.precision = reported == 0 ? 1.0 : static_cast<double>(truth->true_positives) / static_cast<double>(reported);
    }
    if (cost_per_review) {
        if (!(*cost_per_review >= 0.0)) throw ValidationError("cost per review must be nonnegative");
        m.cost_per_review = cost_per_review;
        m.manual_review_cost = static_cast<double>(total) * *cost_per_review;
        m.tool_review_cost = static_cast<double>(reported) * *cost_per_review;
        m.review_cost_saved = *m.manual_review_cost - *m.tool_review_cost;
    }
    return m;
}

} // namespace depwatch
