#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "depwatch/features.hpp"
#include "depwatch/labeling.hpp"
#include "depwatch/labels.hpp"
#include "depwatch/rng.hpp"
#include "depwatch/snapshot.hpp"

namespace depwatch {

using LabelHistogram = std::array<std::size_t, kLabelCount>;

struct LabeledDataset {
    FeatureSchema schema = FeatureSchema::current();
    std::vector<FeatureVector> features;
    std::vector<MaintenanceLabel> labels;

    std::size_t size() const noexcept { return features.size(); }

    LabelHistogram histogram() const {
        LabelHistogram h{};
        for (auto l : labels) ++h[label_index(l)];
        return h;
    }

    void validate() const {
        if (features.empty()) throw ValidationError("dataset is empty");
        if (features.size() != labels.size()) throw ValidationError("dataset rows and labels differ in length");
        if (schema != FeatureSchema::current()) throw ValidationError("dataset uses an unsupported feature schema");
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (features[i].schema_version != schema.version) {
                throw ValidationError("dataset row " + std::to_string(i) + " has schema version " +
                                      std::to_string(features[i].schema_version) + ", expected " +
                                      std::to_string(schema.version));
            }
            for (double v : features[i].values) {
                if (!std::isfinite(v)) throw ValidationError("dataset row " + std::to_string(i) + " is not finite");
            }
        }
    }
};

/// Pairs every vector with its rule-table label.
inline LabeledDataset label_dataset(const std::vector<FeatureVector>& vectors, const MaintenanceThresholds& t = {}) {
    LabeledDataset ds;
    ds.features = vectors;
    for (const auto& v : vectors) ds.labels.push_back(apply_labeling_strategy(v, t));
    ds.validate();
    return ds;
}

/// Seeded shuffle-then-cut split; returns {train, test}.
inline std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds, double train_fraction,
                                                               std::uint64_t seed) {
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const auto cut = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
    std::pair<LabeledDataset, LabeledDataset> out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        auto& part = k < cut ? out.first : out.second;
        part.features.push_back(ds.features[order[k]]);
        part.labels.push_back(ds.labels[order[k]]);
    }
    return out;
}

inline nlohmann::json schema_to_json(const FeatureSchema& s) { return {{"version", s.version}, {"features", s.names}}; }

inline FeatureSchema schema_from_json(const nlohmann::json& j) {
    FeatureSchema s;
    s.version = detail::require<int>(j, "version", "schema");
    s.names = detail::require<std::vector<std::string>>(j, "features", "schema");
    return s;
}

inline nlohmann::json dataset_to_json(const LabeledDataset& ds) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        rows.push_back({{"features", ds.features[i].values}, {"label", label_name(ds.labels[i])}});
    }
    return {{"schema", schema_to_json(ds.schema)}, {"rows", std::move(rows)}};
}

inline LabeledDataset parse_dataset(std::string_view text) {
    const auto doc = detail::parse_json_text(text, "dataset");
    LabeledDataset ds;
    ds.schema = schema_from_json(detail::require<nlohmann::json>(doc, "schema", "dataset"));
    if (ds.schema != FeatureSchema::current()) {
        throw ValidationError("dataset feature schema does not match this build's schema (version " +
                              std::to_string(kFeatureSchemaVersion) + ")");
    }
    for (const auto& row : detail::require<nlohmann::json>(doc, "rows", "dataset")) {
        const auto values = detail::require<std::vector<double>>(row, "features", "dataset row");
        if (values.size() != kFeatureCount) throw ValidationError("dataset row has the wrong number of features");
        FeatureVector fv;
        std::copy(values.begin(), values.end(), fv.values.begin());
        ds.features.push_back(fv);
        ds.labels.push_back(parse_label(detail::require<std::string>(row, "label", "dataset row")));
    }
    ds.validate();
    return ds;
}

} // namespace depwatch
