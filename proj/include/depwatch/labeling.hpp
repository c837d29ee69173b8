#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "depwatch/features.hpp"
#include "depwatch/labels.hpp"

namespace depwatch {

/// Labeling rules in precedence order.
enum class LabelRule : std::uint8_t {
    Retired = 0,         ///< archived or README-deprecated -> Inactive
    RecentCommits = 1,   ///< commits in the active window -> Active
    Paused = 2,          ///< last commit within the dormant window -> Dormant
    StandbyCommunity = 3,///< long quiet but stable/responsive -> FeatureComplete
    Fallback = 4,        ///< everything else -> Inactive
};

inline constexpr std::size_t kRuleCount = 5;

inline constexpr std::string_view rule_name(LabelRule rule) {
    switch (rule) {
    case LabelRule::Retired: return "R0";
    case LabelRule::RecentCommits: return "R1";
    case LabelRule::Paused: return "R2";
    case LabelRule::StandbyCommunity: return "R3";
    case LabelRule::Fallback: return "R4";
    }
    return "R4";
}

/// Raw guard of every rule, evaluated independently of precedence. The fallback guard is the
/// complement of the other four, so at least one guard is always true.
inline std::array<bool, kRuleCount> rule_guards(const FeatureVector& f, const MaintenanceThresholds& t = {}) {
    const double since_commit = f[Feature::days_since_last_commit];
    const double response = f[Feature::median_issue_response_hours];
    std::array<bool, kRuleCount> g{};
    g[0] = f.flag(Feature::archived) || f.flag(Feature::readme_deprecated);
    g[1] = f[Feature::commits_90d] >= 1 && since_commit <= t.active_days;
    // Any commit inside the dormant window also lands inside the trailing 365-day count, so
    // commits_365d >= 1 is the "prior activity exists" condition.
    g[2] = since_commit > t.active_days && since_commit <= t.dormant_days && f[Feature::commits_365d] >= 1;
    g[3] = since_commit > t.dormant_days &&
           (f.flag(Feature::readme_stable_declared) || (response >= 0 && response <= t.responsive_hours));
    g[4] = !(g[0] || g[1] || g[2] || g[3]);
    return g;
}

struct LabelingDecision {
    MaintenanceLabel label;
    LabelRule rule;
};

inline LabelingDecision labeling_decision(const FeatureVector& f, const MaintenanceThresholds& t = {}) {
    static constexpr std::array<MaintenanceLabel, kRuleCount> kOutcome = {
        MaintenanceLabel::Inactive, MaintenanceLabel::Active, MaintenanceLabel::Dormant,
        MaintenanceLabel::FeatureComplete, MaintenanceLabel::Inactive};
    const auto guards = rule_guards(f, t);
    std::size_t r = 0;
    while (!guards[r]) ++r;
    return {kOutcome[r], static_cast<LabelRule>(r)};
}

inline MaintenanceLabel apply_labeling_strategy(const FeatureVector& f, const MaintenanceThresholds& t = {}) {
    return labeling_decision(f, t).label;
}

} // namespace depwatch
