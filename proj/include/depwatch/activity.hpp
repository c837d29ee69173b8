#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "depwatch/date.hpp"
#include "depwatch/error.hpp"
#include "depwatch/repo_ref.hpp"
#include "depwatch/snapshot.hpp"

namespace depwatch {

/// One Monday-based UTC week of repository activity.
///
/// `authors` attributes the week's commits (author id -> commit count). It must be present
/// whenever `commits > 0`, must sum to `commits`, and its size is `active_contributors`.
/// `stars_total` is a running total, not a per-week delta.
struct WeekBucket {
    Date week_start;
    std::uint32_t commits = 0;
    std::uint32_t active_contributors = 0;
    std::uint32_t issues_opened = 0;
    std::uint32_t issues_closed = 0;
    std::uint64_t stars_total = 0;
    std::map<std::string, std::uint32_t> authors;

    bool operator==(const WeekBucket&) const = default;
};

struct ActivityTimeSeries {
    RepoRef repo;
    Date created_at;
    std::vector<WeekBucket> weeks;
    std::vector<Date> releases;
    std::vector<double> issue_response_samples_hours;
    std::optional<Date> archived_at;
    bool readme_deprecated = false;
    bool readme_stable_declared = false;

    void validate() const {
        const std::string where = "activity of " + repo.str();
        repo.validate();
        for (std::size_t i = 0; i < weeks.size(); ++i) {
            const auto& w = weeks[i];
            if (!is_monday(w.week_start)) {
                throw ValidationError(where + ": week " + format_date(w.week_start) + " does not start on a Monday");
            }
            if (i > 0 && w.week_start - weeks[i - 1].week_start != std::chrono::days{7}) {
                throw ValidationError(where + ": weeks are not contiguous at " + format_date(w.week_start));
            }
            std::uint64_t attributed = 0;
            for (const auto& [author, n] : w.authors) {
                if (author.empty() || n == 0) {
                    throw ValidationError(where + ": empty author entry in week " + format_date(w.week_start));
                }
                attributed += n;
            }
            if (attributed != w.commits || w.authors.size() != w.active_contributors) {
                throw ValidationError(where + ": author breakdown of week " + format_date(w.week_start) +
                                      " disagrees with commits/active_contributors");
            }
        }
        for (double h : issue_response_samples_hours) {
            if (!std::isfinite(h) || h < 0.0) throw ValidationError(where + ": invalid issue response sample");
        }
        if (archived_at && *archived_at < created_at) {
            throw ValidationError(where + ": archived_at precedes created_at");
        }
    }

    bool operator==(const ActivityTimeSeries&) const = default;
};

namespace detail {

inline std::uint64_t count_field(const nlohmann::json& obj, const char* key, std::string_view context) {
    if (!obj.contains(key)) return 0;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ValidationError(std::string(context) + ": '" + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < 0) throw ValidationError(std::string(context) + ": '" + key + "' must be >= 0");
    return static_cast<std::uint64_t>(x);
}

} // namespace detail

inline ActivityTimeSeries activity_from_json(const nlohmann::json& doc) {
    const std::string ctx = "activity";
    ActivityTimeSeries a;
    a.repo = detail::repo_from_json(detail::require<nlohmann::json>(doc, "repo", ctx), ctx + " repo");
    a.created_at = parse_date(detail::require<std::string>(doc, "created_at", ctx));
    for (const auto& w : detail::require<nlohmann::json>(doc, "weeks", ctx)) {
        WeekBucket b;
        b.week_start = parse_date(detail::require<std::string>(w, "week_start", ctx + " week"));
        const std::string wctx = ctx + " week " + format_date(b.week_start);
        b.commits = static_cast<std::uint32_t>(detail::count_field(w, "commits", wctx));
        b.active_contributors = static_cast<std::uint32_t>(detail::count_field(w, "active_contributors", wctx));
        b.issues_opened = static_cast<std::uint32_t>(detail::count_field(w, "issues_opened", wctx));
        b.issues_closed = static_cast<std::uint32_t>(detail::count_field(w, "issues_closed", wctx));
        b.stars_total = detail::count_field(w, "stars_total", wctx);
        if (w.contains("authors")) {
            for (auto it = w.at("authors").begin(); it != w.at("authors").end(); ++it) {
                b.authors[it.key()] = static_cast<std::uint32_t>(detail::count_field(w.at("authors"), it.key().c_str(), wctx));
            }
        }
        a.weeks.push_back(std::move(b));
    }
    if (doc.contains("releases")) {
        for (const auto& r : doc.at("releases")) a.releases.push_back(parse_date(r.get<std::string>()));
        std::sort(a.releases.begin(), a.releases.end());
    }
    if (doc.contains("issue_response_samples_hours")) {
        a.issue_response_samples_hours = doc.at("issue_response_samples_hours").get<std::vector<double>>();
    }
    if (doc.contains("archived_at") && !doc.at("archived_at").is_null()) {
        a.archived_at = parse_date(doc.at("archived_at").get<std::string>());
    }
    a.readme_deprecated = doc.value("readme_deprecated", false);
    a.readme_stable_declared = doc.value("readme_stable_declared", false);
    a.validate();
    return a;
}

inline ActivityTimeSeries parse_activity(std::string_view text) {
    return activity_from_json(detail::parse_json_text(text, "activity file"));
}

inline nlohmann::json activity_to_json(const ActivityTimeSeries& a) {
    nlohmann::json weeks = nlohmann::json::array();
    for (const auto& w : a.weeks) {
        nlohmann::json entry{{"week_start", format_date(w.week_start)},
                             {"commits", w.commits},
                             {"active_contributors", w.active_contributors},
                             {"issues_opened", w.issues_opened},
                             {"issues_closed", w.issues_closed},
                             {"stars_total", w.stars_total}};
        if (!w.authors.empty()) entry["authors"] = w.authors;
        weeks.push_back(std::move(entry));
    }
    nlohmann::json releases = nlohmann::json::array();
    for (auto r : a.releases) releases.push_back(format_date(r));
    return {{"repo", detail::repo_to_json(a.repo)},
            {"created_at", format_date(a.created_at)},
            {"weeks", std::move(weeks)},
            {"releases", std::move(releases)},
            {"issue_response_samples_hours", a.issue_response_samples_hours},
            {"archived_at", a.archived_at ? nlohmann::json(format_date(*a.archived_at)) : nlohmann::json(nullptr)},
            {"readme_deprecated", a.readme_deprecated},
            {"readme_stable_declared", a.readme_stable_declared}};
}

/// Stable textual form used by the offline store (sorted keys, two-space indent).
inline std::string serialize_activity(const ActivityTimeSeries& a) { return activity_to_json(a).dump(2) + "\n"; }

/// Restricts the weekly series to `window`, never starting before the creation week, and
/// fills weeks without events with zero counts (stars carried forward as a running total).
inline ActivityTimeSeries clip_to_window(const ActivityTimeSeries& series, DateRange window) {
    ActivityTimeSeries out = series;
    out.weeks.clear();
    const Date first = week_start_of(std::max(window.from, series.created_at));
    const Date last = week_start_of(window.to);
    std::uint64_t stars = 0;
    std::size_t i = 0;
    for (; i < series.weeks.size() && series.weeks[i].week_start < first; ++i) stars = series.weeks[i].stars_total;
    for (Date d = first; d <= last; d += std::chrono::days{7}) {
        while (i < series.weeks.size() && series.weeks[i].week_start < d) ++i;
        if (i < series.weeks.size() && series.weeks[i].week_start == d) {
            out.weeks.push_back(series.weeks[i]);
            stars = series.weeks[i].stars_total;
        } else {
            WeekBucket empty;
            empty.week_start = d;
            empty.stars_total = stars;
            out.weeks.push_back(std::move(empty));
        }
    }
    return out;
}

} // namespace depwatch
