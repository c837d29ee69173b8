#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "depwatch/error.hpp"

namespace depwatch {

/// Maintenance-activity state. The enumerator order is the fixed tie-break order.
enum class MaintenanceLabel : std::uint8_t { Active = 0, FeatureComplete = 1, Dormant = 2, Inactive = 3 };

inline constexpr std::size_t kLabelCount = 4;

inline constexpr std::array<MaintenanceLabel, kLabelCount> kAllLabels = {
    MaintenanceLabel::Active, MaintenanceLabel::FeatureComplete, MaintenanceLabel::Dormant,
    MaintenanceLabel::Inactive};

inline constexpr std::size_t label_index(MaintenanceLabel label) { return static_cast<std::size_t>(label); }

inline constexpr std::string_view label_name(MaintenanceLabel label) {
    switch (label) {
    case MaintenanceLabel::Active: return "active";
    case MaintenanceLabel::FeatureComplete: return "feature_complete";
    case MaintenanceLabel::Dormant: return "dormant";
    case MaintenanceLabel::Inactive: return "inactive";
    }
    return "inactive";
}

inline MaintenanceLabel parse_label(std::string_view text) {
    for (auto label : kAllLabels) {
        if (label_name(label) == text) return label;
    }
    throw ValidationError("unknown maintenance label '" + std::string(text) + "'");
}

} // namespace depwatch
