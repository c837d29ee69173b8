#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "depwatch/activity.hpp"
#include "depwatch/date.hpp"
#include "depwatch/error.hpp"

namespace depwatch {

/// Feature slots, in schema order. Flags come last and hold 0 or 1.
enum class Feature : std::size_t {
    commits_30d,
    commits_90d,
    commits_365d,
    contributors_365d,
    core_contributors_365d,
    days_since_last_commit,
    days_since_last_release,
    releases_365d,
    issues_opened_365d,
    issues_closed_365d,
    issue_close_ratio_365d,
    median_issue_response_hours,
    stars_total,
    project_age_days,
    archived,
    readme_deprecated,
    readme_stable_declared,
};

inline constexpr std::size_t kFeatureCount = 17;
inline constexpr std::size_t kNumericFeatureCount = 14;
inline constexpr int kFeatureSchemaVersion = 1;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "commits_30d",          "commits_90d",         "commits_365d",
    "contributors_365d",    "core_contributors_365d", "days_since_last_commit",
    "days_since_last_release", "releases_365d",    "issues_opened_365d",
    "issues_closed_365d",   "issue_close_ratio_365d", "median_issue_response_hours",
    "stars_total",          "project_age_days",    "archived",
    "readme_deprecated",    "readme_stable_declared"};

/// Marker for "no issue response data".
inline constexpr double kNoData = -1.0;

struct FeatureSchema {
    int version = kFeatureSchemaVersion;
    std::vector<std::string> names;

    static FeatureSchema current() {
        FeatureSchema s;
        for (auto n : kFeatureNames) s.names.emplace_back(n);
        return s;
    }

    bool operator==(const FeatureSchema&) const = default;
};

struct FeatureVector {
    int schema_version = kFeatureSchemaVersion;
    std::array<double, kFeatureCount> values{};

    double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
    double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
    bool flag(Feature f) const { return (*this)[f] != 0.0; }

    bool operator==(const FeatureVector&) const = default;
};

/// Tunable thresholds shared by feature extraction and the labeling rules.
struct MaintenanceThresholds {
    double active_days = 90;
    double dormant_days = 365;
    double responsive_hours = 336;
    double core_share = 0.8;
};

namespace detail {

inline double median(std::vector<double> xs) {
    if (xs.empty()) return kNoData;
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

/// Smallest author set covering `share` of all commits; larger contributors first, ties to
/// the alphabetically smaller id.
inline std::size_t core_contributor_count(const std::map<std::string, std::uint64_t>& totals, double share) {
    std::vector<std::pair<std::string, std::uint64_t>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::uint64_t total = 0;
    for (const auto& [_, n] : ranked) total += n;
    if (total == 0) return 0;
    const double needed = share * static_cast<double>(total) * (1.0 - 1e-12);
    std::uint64_t covered = 0;
    std::size_t count = 0;
    for (const auto& [_, n] : ranked) {
        covered += n;
        ++count;
        if (static_cast<double>(covered) >= needed) break;
    }
    return count;
}

} // namespace detail

/// Feature vector as of `as_of`. Only weeks starting on or before `as_of` are considered.
///
/// An N-day window covers the weeks whose `week_start` lies in [as_of - N days, as_of]; a
/// week is counted whole, so e.g. the 30-day window spans four or five weeks. Without any
/// commit (or release) the corresponding "days since" feature equals the project age.
inline FeatureVector compute_features(const ActivityTimeSeries& activity, Date as_of,
                                      const MaintenanceThresholds& thresholds = {}) {
    if (as_of < activity.created_at) {
        throw DomainError("as_of " + format_date(as_of) + " precedes creation of " + activity.repo.str() + " (" +
                          format_date(activity.created_at) + ")");
    }
    using std::chrono::days;
    const auto age = static_cast<double>(days_between(activity.created_at, as_of));
    auto in_window = [&](Date d, int span) { return d >= as_of - days{span} && d <= as_of; };

    double c30 = 0, c90 = 0, c365 = 0, opened = 0, closed = 0, stars = 0;
    std::optional<Date> last_commit;
    std::map<std::string, std::uint64_t> authors;
    for (const auto& w : activity.weeks) {
        if (w.week_start > as_of) break;
        stars = static_cast<double>(w.stars_total);
        if (w.commits > 0) last_commit = w.week_start;
        if (in_window(w.week_start, 30)) c30 += w.commits;
        if (in_window(w.week_start, 90)) c90 += w.commits;
        if (in_window(w.week_start, 365)) {
            c365 += w.commits;
            opened += w.issues_opened;
            closed += w.issues_closed;
            for (const auto& [a, n] : w.authors) authors[a] += n;
        }
    }
    std::optional<Date> last_release;
    double releases = 0;
    for (auto r : activity.releases) {
        if (r > as_of) continue;
        if (!last_release || r > *last_release) last_release = r;
        if (in_window(r, 365)) releases += 1;
    }

    FeatureVector fv;
    fv[Feature::commits_30d] = c30;
    fv[Feature::commits_90d] = c90;
    fv[Feature::commits_365d] = c365;
    fv[Feature::contributors_365d] = static_cast<double>(authors.size());
    fv[Feature::core_contributors_365d] =
        static_cast<double>(detail::core_contributor_count(authors, thresholds.core_share));
    fv[Feature::days_since_last_commit] =
        last_commit ? static_cast<double>(days_between(*last_commit, as_of)) : age;
    fv[Feature::days_since_last_release] =
        last_release ? static_cast<double>(days_between(*last_release, as_of)) : age;
    fv[Feature::releases_365d] = releases;
    fv[Feature::issues_opened_365d] = opened;
    fv[Feature::issues_closed_365d] = closed;
    fv[Feature::issue_close_ratio_365d] = opened == 0 ? 1.0 : std::min(1.0, closed / opened);
    fv[Feature::median_issue_response_hours] = detail::median(activity.issue_response_samples_hours);
    fv[Feature::stars_total] = stars;
    fv[Feature::project_age_days] = age;
    fv[Feature::archived] = activity.archived_at && *activity.archived_at <= as_of ? 1.0 : 0.0;
    fv[Feature::readme_deprecated] = activity.readme_deprecated ? 1.0 : 0.0;
    fv[Feature::readme_stable_declared] = activity.readme_stable_declared ? 1.0 : 0.0;
    return fv;
}

} // namespace depwatch
