#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "depwatch/confusion.hpp"
#include "depwatch/dataset.hpp"
#include "depwatch/error.hpp"
#include "depwatch/features.hpp"
#include "depwatch/labels.hpp"
#include "depwatch/rng.hpp"

namespace depwatch {

/// Per-label probabilities.
struct LabelDistribution {
    std::array<double, kLabelCount> p{};

    double operator[](MaintenanceLabel l) const { return p[label_index(l)]; }

    /// Highest probability; ties go to the earlier label in enum order.
    MaintenanceLabel argmax() const {
        std::size_t best = 0;
        for (std::size_t k = 1; k < kLabelCount; ++k) {
            if (p[k] > p[best]) best = k;
        }
        return static_cast<MaintenanceLabel>(best);
    }

    static LabelDistribution one_hot(MaintenanceLabel l) {
        LabelDistribution d;
        d.p[label_index(l)] = 1.0;
        return d;
    }

    bool operator==(const LabelDistribution&) const = default;
};

struct ForestParams {
    std::size_t n_trees = 100;
    /// 0 = grow until leaves are pure or too small to split.
    std::size_t max_depth = 20;
    std::size_t min_samples_leaf = 1;
    /// 0 = ceil(sqrt(feature count)).
    std::size_t features_per_split = 0;
    std::uint64_t seed = 42;
    /// Refuse to train unless every label occurs at least once.
    bool require_all_labels = true;
    /// Worker threads; 0 = hardware concurrency. Does not affect the result.
    std::size_t threads = 0;
};

/// Flat binary tree; node 0 is the root. Internal nodes send `x[feature] <= threshold` left.
struct DecisionTree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        /// Class counts of the training samples reaching a leaf.
        std::array<std::uint32_t, kLabelCount> votes{};

        bool leaf() const { return feature < 0; }
        bool operator==(const Node&) const = default;
    };

    std::vector<Node> nodes;

    const Node& leaf_for(std::span<const double> x) const {
        const Node* n = &nodes.front();
        while (!n->leaf()) n = &nodes[x[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right];
        return *n;
    }

    /// This tree's single vote: the leaf's majority class, ties to the lower label.
    std::size_t vote(std::span<const double> x) const {
        const auto& v = leaf_for(x).votes;
        return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    }

    bool operator==(const DecisionTree&) const = default;
};

/// Out-of-bag evaluation collected during training (not persisted).
struct OobReport {
    LabelConfusion confusion;
    std::size_t rows_scored = 0;
};

class Classifier {
public:
    FeatureSchema schema = FeatureSchema::current();
    ForestParams params;
    std::vector<DecisionTree> trees;
    std::optional<OobReport> oob;

    bool operator==(const Classifier& other) const {
        return schema == other.schema && trees == other.trees;
    }
};

namespace detail {

inline double gini(const std::array<std::uint32_t, kLabelCount>& counts, std::size_t n) {
    if (n == 0) return 0.0;
    double s = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        s += p * p;
    }
    return 1.0 - s;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<FeatureVector>& x, const std::vector<MaintenanceLabel>& y,
                const ForestParams& params, std::size_t features_per_split, Rng& rng)
        : x_(x), y_(y), params_(params), mtry_(features_per_split), rng_(rng) {}

    DecisionTree build(std::vector<std::size_t> sample) {
        DecisionTree tree;
        tree.nodes.emplace_back();
        grow(tree, 0, std::move(sample), 0);
        return tree;
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double child_impurity = 0.0; // sum of n_child * gini(child)
        std::size_t left_count = 0;
    };

    std::array<std::uint32_t, kLabelCount> count(const std::vector<std::size_t>& rows) const {
        std::array<std::uint32_t, kLabelCount> c{};
        for (auto r : rows) ++c[label_index(y_[r])];
        return c;
    }

    void consider(std::size_t f, std::vector<std::size_t>& rows, Split& best) const {
        std::stable_sort(rows.begin(), rows.end(),
                         [&](std::size_t a, std::size_t b) { return x_[a].values[f] < x_[b].values[f]; });
        const std::size_t n = rows.size();
        std::array<std::uint32_t, kLabelCount> left{}, right = count(rows);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto k = label_index(y_[rows[i]]);
            ++left[k];
            --right[k];
            const double a = x_[rows[i]].values[f], b = x_[rows[i + 1]].values[f];
            if (!(a < b)) continue;
            const std::size_t nl = i + 1, nr = n - nl;
            if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
            const double impurity = static_cast<double>(nl) * gini(left, nl) + static_cast<double>(nr) * gini(right, nr);
            if (best.feature < 0 || impurity < best.child_impurity - 1e-12) {
                double mid = a + (b - a) / 2.0;
                if (!(mid < b)) mid = a;
                best = {static_cast<int>(f), mid, impurity, nl};
            }
        }
    }

    void grow(DecisionTree& tree, std::size_t node, std::vector<std::size_t> rows, std::size_t depth) {
        const auto counts = count(rows);
        const std::size_t n = rows.size();
        const double parent = static_cast<double>(n) * gini(counts, n);
        const bool depth_capped = params_.max_depth != 0 && depth >= params_.max_depth;
        if (depth_capped || n < 2 * params_.min_samples_leaf || parent <= 1e-12) {
            tree.nodes[node].votes = counts;
            return;
        }

        // Candidate features in random order; the first `mtry_` are the sampled subset, the
        // rest are only tried when none of those admits a split.
        const std::size_t n_features = kFeatureCount;
        std::vector<std::size_t> order(n_features);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = 0; i < n_features; ++i) std::swap(order[i], order[i + rng_.index(n_features - i)]);

        Split best;
        std::vector<std::size_t> scratch = rows;
        for (std::size_t i = 0; i < n_features; ++i) {
            if (i >= mtry_ && best.feature >= 0) break;
            consider(order[i], scratch, best);
        }
        if (best.feature < 0 || parent - best.child_impurity <= 1e-12) {
            tree.nodes[node].votes = counts;
            return;
        }

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (x_[r].values[static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(r);
        }
        const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        const auto right_id = static_cast<std::uint32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node].feature = best.feature;
        tree.nodes[node].threshold = best.threshold;
        tree.nodes[node].left = left_id;
        tree.nodes[node].right = right_id;
        grow(tree, left_id, std::move(left), depth + 1);
        grow(tree, right_id, std::move(right), depth + 1);
    }

    const std::vector<FeatureVector>& x_;
    const std::vector<MaintenanceLabel>& y_;
    const ForestParams& params_;
    std::size_t mtry_;
    Rng& rng_;
};

inline void check_schema(const Classifier& model, const FeatureVector& features) {
    if (model.schema != FeatureSchema::current() || features.schema_version != model.schema.version) {
        throw ValidationError("feature schema does not match the classifier's training schema");
    }
}

} // namespace detail

/// Random forest of CART trees (Gini splits, bootstrap rows, random feature subsets).
/// Tree i is grown from its own generator seeded with `seed + i`, so the forest depends only
/// on (dataset, params), not on thread scheduling.
inline Classifier train_classifier(const LabeledDataset& data, const ForestParams& params = {}) {
    data.validate();
    if (params.n_trees == 0) throw ValidationError("n_trees must be positive");
    if (params.min_samples_leaf == 0) throw ValidationError("min_samples_leaf must be positive");
    if (params.require_all_labels) {
        const auto hist = data.histogram();
        std::string missing;
        for (auto l : kAllLabels) {
            if (hist[label_index(l)] == 0) missing += (missing.empty() ? "" : ", ") + std::string(label_name(l));
        }
        if (!missing.empty()) throw TrainingError("training data lacks labels: " + missing);
    }
    const std::size_t mtry = params.features_per_split
                                 ? std::min(params.features_per_split, kFeatureCount)
                                 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(kFeatureCount))));

    Classifier model;
    model.schema = data.schema;
    model.params = params;
    model.trees.resize(params.n_trees);
    const std::size_t n = data.size();
    std::vector<std::vector<bool>> in_bag(params.n_trees);

    auto grow_tree = [&](std::size_t t) {
        Rng rng(params.seed + t);
        std::vector<std::size_t> sample(n);
        in_bag[t].assign(n, false);
        for (auto& s : sample) {
            s = rng.index(n);
            in_bag[t][s] = true;
        }
        detail::TreeBuilder builder(data.features, data.labels, params, mtry, rng);
        model.trees[t] = builder.build(std::move(sample));
    };
    std::size_t threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, params.n_trees);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < params.n_trees; t += threads) grow_tree(t);
            });
        }
    }

    OobReport oob;
    for (std::size_t r = 0; r < n; ++r) {
        std::array<std::size_t, kLabelCount> votes{};
        std::size_t voters = 0;
        for (std::size_t t = 0; t < params.n_trees; ++t) {
            if (in_bag[t][r]) continue;
            ++votes[model.trees[t].vote(data.features[r].values)];
            ++voters;
        }
        if (voters == 0) continue;
        const auto predicted = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        oob.confusion.add(label_index(data.labels[r]), predicted);
        ++oob.rows_scored;
    }
    model.oob = oob;
    return model;
}

/// Fraction of trees voting for each label.
inline LabelDistribution classify(const Classifier& model, const FeatureVector& features) {
    detail::check_schema(model, features);
    LabelDistribution d;
    for (const auto& tree : model.trees) d.p[tree.vote(features.values)] += 1.0;
    for (auto& p : d.p) p /= static_cast<double>(model.trees.size());
    return d;
}

struct FeatureImportance {
    std::string name;
    double importance = 0.0;
};

/// Mean decrease in Gini impurity, normalised to sum to 1 (all zero when no tree splits).
/// Node sample counts are recovered from leaf votes, so this works on reloaded models too.
inline std::vector<FeatureImportance> feature_importance(const Classifier& model) {
    std::vector<double> total(model.schema.names.size(), 0.0);
    for (const auto& tree : model.trees) {
        std::vector<std::array<std::uint32_t, kLabelCount>> counts(tree.nodes.size());
        // Children always follow their parent, so a reverse sweep aggregates bottom-up.
        for (std::size_t i = tree.nodes.size(); i-- > 0;) {
            const auto& node = tree.nodes[i];
            if (node.leaf()) {
                counts[i] = node.votes;
            } else {
                for (std::size_t k = 0; k < kLabelCount; ++k) counts[i][k] = counts[node.left][k] + counts[node.right][k];
            }
        }
        auto size = [&](std::size_t i) {
            std::size_t s = 0;
            for (auto c : counts[i]) s += c;
            return s;
        };
        const double root = static_cast<double>(size(0));
        double tree_total = 0.0;
        std::vector<double> per_feature(total.size(), 0.0);
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& node = tree.nodes[i];
            if (node.leaf()) continue;
            const auto n = size(i), nl = size(node.left), nr = size(node.right);
            const double decrease = static_cast<double>(n) * detail::gini(counts[i], n) -
                                    static_cast<double>(nl) * detail::gini(counts[node.left], nl) -
                                    static_cast<double>(nr) * detail::gini(counts[node.right], nr);
            per_feature[static_cast<std::size_t>(node.feature)] += decrease / root;
            tree_total += decrease / root;
        }
        for (std::size_t f = 0; f < total.size(); ++f) total[f] += per_feature[f];
    }
    double sum = 0.0;
    for (double v : total) sum += v;
    std::vector<FeatureImportance> out;
    for (std::size_t f = 0; f < total.size(); ++f) out.push_back({model.schema.names[f], sum > 0 ? total[f] / sum : 0.0});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.importance != b.importance ? a.importance > b.importance : a.name < b.name;
    });
    return out;
}

namespace detail {

inline nlohmann::json tree_node_to_json(const DecisionTree& tree, std::size_t i) {
    const auto& n = tree.nodes[i];
    if (n.leaf()) return {{"votes", n.votes}};
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", tree_node_to_json(tree, n.left)},
            {"right", tree_node_to_json(tree, n.right)}};
}

/// Mirrors the builder's layout: both children are allocated before either is filled.
inline void tree_node_from_json(const nlohmann::json& j, DecisionTree& tree, std::size_t id, std::size_t n_features) {
    if (j.contains("votes")) {
        tree.nodes[id].votes = j.at("votes").get<std::array<std::uint32_t, kLabelCount>>();
        return;
    }
    const int feature = require<int>(j, "feature", "model node");
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) throw ValidationError("model node feature out of range");
    const auto left = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    tree.nodes[id].feature = feature;
    tree.nodes[id].threshold = require<double>(j, "threshold", "model node");
    tree.nodes[id].left = left;
    tree.nodes[id].right = left + 1;
    tree_node_from_json(require<nlohmann::json>(j, "left", "model node"), tree, left, n_features);
    tree_node_from_json(require<nlohmann::json>(j, "right", "model node"), tree, left + 1, n_features);
}

} // namespace detail

inline nlohmann::json classifier_to_json(const Classifier& model) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto l : kAllLabels) labels.push_back(label_name(l));
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees) trees.push_back(detail::tree_node_to_json(t, 0));
    const auto& p = model.params;
    return {{"format", "depwatch-forest"},
            {"schema", schema_to_json(model.schema)},
            {"labels", std::move(labels)},
            {"hyperparams",
             {{"n_trees", p.n_trees},
              {"max_depth", p.max_depth},
              {"min_samples_leaf", p.min_samples_leaf},
              {"features_per_split", p.features_per_split},
              {"seed", p.seed}}},
            {"trees", std::move(trees)}};
}

/// Compact, byte-stable model text.
inline std::string serialize_classifier(const Classifier& model) { return classifier_to_json(model).dump() + "\n"; }

inline Classifier parse_classifier(std::string_view text) {
    const auto doc = detail::parse_json_text(text, "model");
    if (doc.value("format", "") != "depwatch-forest") throw ValidationError("not a depwatch forest model");
    Classifier model;
    model.schema = schema_from_json(detail::require<nlohmann::json>(doc, "schema", "model"));
    const auto hp = detail::require<nlohmann::json>(doc, "hyperparams", "model");
    model.params.n_trees = hp.value<std::size_t>("n_trees", 0);
    model.params.max_depth = hp.value<std::size_t>("max_depth", 0);
    model.params.min_samples_leaf = hp.value<std::size_t>("min_samples_leaf", 1);
    model.params.features_per_split = hp.value<std::size_t>("features_per_split", 0);
    model.params.seed = hp.value<std::uint64_t>("seed", 0);
    for (const auto& t : detail::require<nlohmann::json>(doc, "trees", "model")) {
        DecisionTree tree;
        tree.nodes.emplace_back();
        detail::tree_node_from_json(t, tree, 0, model.schema.names.size());
        model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty() || model.trees.size() != model.params.n_trees) {
        throw ValidationError("model tree count does not match n_trees");
    }
    return model;
}

} // namespace depwatch
