#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depwatch/error.hpp"
#include "depwatch/graph.hpp"
#include "depwatch/labels.hpp"

namespace depwatch {

enum class Direction : std::uint8_t { AsIs, Reversed };

struct PropagationConfig {
    double damping = 0.85;
    /// L1 change between iterations.
    double tolerance = 1e-9;
    std::size_t max_iterations = 200;
    Direction direction = Direction::AsIs;

    void validate() const {
        if (!(damping > 0.0 && damping < 1.0)) throw ValidationError("damping must lie strictly between 0 and 1");
        if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
        if (max_iterations == 0) throw ValidationError("max_iterations must be positive");
    }
};

/// One score per graph node, indexed like `DependencyGraph::nodes()`.
struct NodeScores {
    std::vector<double> values;
    bool converged = true;
    std::size_t iterations = 0;

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const noexcept { return values.size(); }
};

/// Called after every iteration with the current score vector.
using IterationObserver = std::function<void(std::size_t iteration, std::span<const double> scores)>;

namespace detail {

/// Power iteration with teleport distribution `teleport` (sums to 1). Dangling nodes hand
/// their mass to the teleport distribution, which keeps the vector stochastic.
inline NodeScores power_iteration(const DependencyGraph& graph, const PropagationConfig& cfg,
                                  const std::vector<double>& teleport, const IterationObserver& observer) {
    const std::size_t n = graph.size();
    const bool reversed = cfg.direction == Direction::Reversed;
    auto out_links = [&](std::size_t i) -> const std::vector<std::size_t>& {
        return reversed ? graph.predecessors(i) : graph.successors(i);
    };

    NodeScores result;
    std::vector<double> p(n, 1.0 / static_cast<double>(n)), next(n);
    result.converged = false;
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (out_links(i).empty()) dangling += p[i];
        }
        for (std::size_t i = 0; i < n; ++i) next[i] = ((1.0 - cfg.damping) + cfg.damping * dangling) * teleport[i];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& links = out_links(i);
            if (links.empty()) continue;
            const double share = cfg.damping * p[i] / static_cast<double>(links.size());
            for (auto j : links) next[j] += share;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - p[i]);
        p.swap(next);
        result.iterations = it;
        if (observer) observer(it, p);
        if (change <= cfg.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.values = std::move(p);
    return result;
}

} // namespace detail

inline NodeScores pagerank(const DependencyGraph& graph, const PropagationConfig& cfg = {},
                           const IterationObserver& observer = {}) {
    cfg.validate();
    if (graph.size() == 0) throw ValidationError("PageRank needs a nonempty graph");
    const std::vector<double> uniform(graph.size(), 1.0 / static_cast<double>(graph.size()));
    return detail::power_iteration(graph, cfg, uniform, observer);
}

/// PageRank whose teleport distribution is proportional to `weights` (node index order).
inline NodeScores personalized_pagerank(const DependencyGraph& graph, const PropagationConfig& cfg,
                                        const std::vector<double>& weights, const IterationObserver& observer = {}) {
    cfg.validate();
    if (graph.size() == 0) throw ValidationError("PageRank needs a nonempty graph");
    if (weights.size() != graph.size()) throw ValidationError("one teleport weight per node is required");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("teleport weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) throw ValidationError("teleport weights are all zero");
    std::vector<double> teleport(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) teleport[i] = weights[i] / total;
    return detail::power_iteration(graph, cfg, teleport, observer);
}

enum class CentralityKind : std::uint8_t { Degree, InDegree, OutDegree, Eigenvector };

inline std::string_view centrality_name(CentralityKind k) {
    switch (k) {
    case CentralityKind::Degree: return "degree";
    case CentralityKind::InDegree: return "in_degree";
    case CentralityKind::OutDegree: return "out_degree";
    case CentralityKind::Eigenvector: return "eigenvector";
    }
    return "degree";
}

/// Degree kinds are counts over (n - 1); `Degree` counts in + out. Eigenvector centrality
/// scores a node by the scores of nodes pointing at it (dominant eigenvector of A^T, L2
/// norm 1). It iterates x <- x + A^T x, which has the same dominant eigenvector but does not
/// oscillate on periodic graphs.
inline NodeScores centrality(const DependencyGraph& graph, CentralityKind kind, const PropagationConfig& cfg = {}) {
    const std::size_t n = graph.size();
    if (n == 0) throw ValidationError("centrality needs a nonempty graph");
    NodeScores result;
    result.values.assign(n, 0.0);
    if (kind != CentralityKind::Eigenvector) {
        if (n == 1) return result;
        const double denom = static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const auto in = static_cast<double>(graph.predecessors(i).size());
            const auto out = static_cast<double>(graph.successors(i).size());
            result.values[i] = (kind == CentralityKind::InDegree    ? in
                                : kind == CentralityKind::OutDegree ? out
                                                                    : in + out) /
                               denom;
        }
        return result;
    }

    cfg.validate();
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
    result.converged = false;
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        next = x;
        for (std::size_t i = 0; i < n; ++i)
            for (auto j : graph.successors(i)) next[j] += x[i];
        double norm = 0.0;
        for (double v : next) norm += v * v;
        norm = std::sqrt(norm);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] /= norm;
            change += std::abs(next[i] - x[i]);
        }
        x.swap(next);
        result.iterations = it;
        if (change <= cfg.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.values = std::move(x);
    return result;
}

/// Teleport weight per label for the risk run.
struct RiskWeights {
    double active = 0.0;
    double feature_complete = 0.25;
    double dormant = 0.6;
    double inactive = 1.0;

    double operator()(MaintenanceLabel l) const {
        switch (l) {
        case MaintenanceLabel::Active: return active;
        case MaintenanceLabel::FeatureComplete: return feature_complete;
        case MaintenanceLabel::Dormant: return dormant;
        case MaintenanceLabel::Inactive: return inactive;
        }
        return 0.0;
    }
};

namespace detail {

inline std::vector<MaintenanceLabel> labels_by_index(const DependencyGraph& graph,
                                                     const std::map<LibraryId, MaintenanceLabel>& labels) {
    std::vector<MaintenanceLabel> out;
    out.reserve(graph.size());
    for (const auto& id : graph.nodes()) {
        const auto it = labels.find(id);
        if (it == labels.end()) throw ValidationError("no maintenance label for " + id.str());
        out.push_back(it->second);
    }
    return out;
}

} // namespace detail

/// Activity-weighted personalized PageRank. Unless the caller overrides it, edges are
/// reversed so that poorly maintained dependencies push mass toward their dependents.
/// When every weight is zero (nothing is at risk) all scores are 0.
inline NodeScores activity_risk(const DependencyGraph& graph, const std::map<LibraryId, MaintenanceLabel>& labels,
                                PropagationConfig cfg = {.direction = Direction::Reversed},
                                const RiskWeights& weights = {}) {
    const auto by_index = detail::labels_by_index(graph, labels);
    std::vector<double> w;
    double total = 0.0;
    for (auto l : by_index) {
        w.push_back(weights(l));
        total += w.back();
    }
    if (total <= 0.0) {
        NodeScores none;
        none.values.assign(graph.size(), 0.0);
        return none;
    }
    return personalized_pagerank(graph, cfg, w);
}

enum class Verdict : std::uint8_t { Unsuspicious, Suspicious };

inline std::string_view verdict_name(Verdict v) { return v == Verdict::Suspicious ? "suspicious" : "unsuspicious"; }

struct Culprit {
    LibraryId id;
    MaintenanceLabel label;
    double risk = 0.0;
};

struct SuspicionVerdict {
    LibraryId node;
    MaintenanceLabel self_label = MaintenanceLabel::Active;
    Verdict verdict = Verdict::Unsuspicious;
    /// Non-Active transitive dependencies other than the node itself, highest risk first
    /// (then by id).
    std::vector<Culprit> culprits;
    double risk_score = 0.0;
};

struct VerdictOptions {
    /// Count FeatureComplete transitive dependencies as negative signs.
    bool feature_complete_is_negative = true;
};

/// A node is Unsuspicious iff it is Active and so is everything it transitively depends on.
/// `risk` only orders culprits; it never changes a verdict.
inline std::vector<SuspicionVerdict> aggregate_verdicts(const DependencyGraph& graph,
                                                        const std::map<LibraryId, MaintenanceLabel>& labels,
                                                        const NodeScores& risk, const VerdictOptions& options = {}) {
    const auto by_index = detail::labels_by_index(graph, labels);
    if (risk.size() != graph.size()) throw ValidationError("one risk score per node is required");
    auto negative = [&](MaintenanceLabel l) {
        return l != MaintenanceLabel::Active && (options.feature_complete_is_negative || l != MaintenanceLabel::FeatureComplete);
    };
    std::vector<SuspicionVerdict> out;
    out.reserve(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) {
        SuspicionVerdict v;
        v.node = graph.nodes()[i];
        v.self_label = by_index[i];
        v.risk_score = risk[i];
        const auto reach = reachable_from(graph, i);
        for (std::size_t j = 0; j < graph.size(); ++j) {
            if (j != i && reach[j] && negative(by_index[j])) v.culprits.push_back({graph.nodes()[j], by_index[j], risk[j]});
        }
        std::sort(v.culprits.begin(), v.culprits.end(), [](const Culprit& a, const Culprit& b) {
            return a.risk != b.risk ? a.risk > b.risk : a.id < b.id;
        });
        v.verdict = v.self_label == MaintenanceLabel::Active && v.culprits.empty() ? Verdict::Unsuspicious : Verdict::Suspicious;
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace depwatch
