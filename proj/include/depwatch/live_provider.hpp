#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "depwatch/activity.hpp"
#include "depwatch/error.hpp"
#include "depwatch/provider.hpp"

namespace depwatch {

struct LiveProviderOptions {
    /// e.g. `http://forge.internal:8080/api`. Repository endpoints hang below
    /// `<base>/repos/<owner>/<name>`.
    std::string base_url;
    /// Bearer token; when empty the `DEPWATCH_TOKEN` environment variable is used.
    std::string token;
    int per_page = 100;
    int max_retries = 3;
    std::chrono::seconds max_retry_wait{60};
    std::chrono::seconds timeout{30};
    std::function<void(std::chrono::seconds)> sleep = [](std::chrono::seconds s) { std::this_thread::sleep_for(s); };
};

/// REST forge client.
///
/// Endpoints (all JSON):
///   GET /repos/{owner}/{name}           created_at, archived_at, stargazers_count,
///                                       readme_deprecated, readme_stable_declared
///   GET /repos/{owner}/{name}/commits   [{author, date}]               paginated
///   GET /repos/{owner}/{name}/issues    [{created_at, closed_at, first_response_hours}] paginated
///   GET /repos/{owner}/{name}/releases  [{published_at}]                paginated
///
/// Pagination follows a `Link: <...>; rel="next"` header when present and otherwise stops on
/// a short page. HTTP 429 is retried after `Retry-After` seconds up to `max_retries` times.
/// The forge reports only the current star count, so every week carries that value.
class LiveProvider final : public ActivityProvider {
public:
    explicit LiveProvider(LiveProviderOptions options) : options_(std::move(options)) {
        const auto scheme_end = options_.base_url.find("://");
        if (scheme_end == std::string::npos) throw ValidationError("base URL '" + options_.base_url + "' lacks a scheme");
        const auto path_start = options_.base_url.find('/', scheme_end + 3);
        origin_ = options_.base_url.substr(0, path_start);
        prefix_ = path_start == std::string::npos ? "" : options_.base_url.substr(path_start);
        while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
        if (options_.token.empty()) {
            if (const char* env = std::getenv("DEPWATCH_TOKEN")) options_.token = env;
        }
    }

    ActivityTimeSeries fetch(const RepoRef& repo, DateRange window) const override {
        repo.validate();
        const std::string base = prefix_ + "/repos/" + repo.owner + "/" + repo.name;
        const auto meta = get_json(base, repo);

        ActivityTimeSeries a;
        a.repo = repo;
        a.created_at = parse_date(detail::require<std::string>(meta, "created_at", "repository metadata"));
        if (meta.contains("archived_at") && !meta.at("archived_at").is_null()) {
            a.archived_at = parse_date(meta.at("archived_at").get<std::string>());
        }
        a.readme_deprecated = meta.value("readme_deprecated", false);
        a.readme_stable_declared = meta.value("readme_stable_declared", false);
        const auto stars = meta.value<std::uint64_t>("stargazers_count", 0);

        const Date first = week_start_of(std::max(window.from, a.created_at));
        const Date last = week_start_of(window.to);
        std::map<Date, WeekBucket> weeks;
        for (Date d = first; d <= last; d += std::chrono::days{7}) {
            auto& w = weeks[d];
            w.week_start = d;
            w.stars_total = stars;
        }
        auto bucket = [&](Date day) -> WeekBucket* {
            const auto it = weeks.find(week_start_of(day));
            return it == weeks.end() ? nullptr : &it->second;
        };

        const std::string range = "since=" + format_date(window.from) + "&until=" + format_date(window.to);
        for (const auto& c : get_paginated(base + "/commits", range, repo)) {
            if (auto* w = bucket(parse_date(detail::require<std::string>(c, "date", "commit")))) {
                ++w->commits;
                ++w->authors[detail::require<std::string>(c, "author", "commit")];
            }
        }
        for (const auto& issue : get_paginated(base + "/issues", "state=all", repo)) {
            if (auto* w = bucket(parse_date(detail::require<std::string>(issue, "created_at", "issue")))) {
                ++w->issues_opened;
            }
            if (issue.contains("closed_at") && !issue.at("closed_at").is_null()) {
                if (auto* w = bucket(parse_date(issue.at("closed_at").get<std::string>()))) ++w->issues_closed;
            }
            if (issue.contains("first_response_hours") && !issue.at("first_response_hours").is_null()) {
                a.issue_response_samples_hours.push_back(issue.at("first_response_hours").get<double>());
            }
        }
        for (const auto& rel : get_paginated(base + "/releases", "", repo)) {
            a.releases.push_back(parse_date(detail::require<std::string>(rel, "published_at", "release")));
        }
        std::sort(a.releases.begin(), a.releases.end());
        for (auto& [_, w] : weeks) {
            w.active_contributors = static_cast<std::uint32_t>(w.authors.size());
            a.weeks.push_back(std::move(w));
        }
        a.validate();
        return a;
    }

private:
    httplib::Result request(const std::string& path) const {
        httplib::Client client(origin_);
        client.set_connection_timeout(options_.timeout);
        client.set_read_timeout(options_.timeout);
        httplib::Headers headers{{"Accept", "application/json"}, {"User-Agent", "depwatch"}};
        if (!options_.token.empty()) headers.emplace("Authorization", "Bearer " + options_.token);
        return client.Get(path, headers);
    }

    /// One GET with 429 handling; returns the successful response.
    httplib::Response get(const std::string& path, const RepoRef& repo) const {
        for (int attempt = 0;; ++attempt) {
            auto res = request(path);
            if (!res) {
                throw TransportError("request to " + origin_ + path + " failed: " + httplib::to_string(res.error()));
            }
            if (res->status == 429) {
                std::chrono::seconds wait{1};
                if (res->has_header("Retry-After")) wait = std::chrono::seconds{std::atoll(res->get_header_value("Retry-After").c_str())};
                if (attempt >= options_.max_retries) {
                    throw RateLimitedError("rate limited while fetching " + repo.str(), wait);
                }
                options_.sleep(std::min(wait, options_.max_retry_wait));
                continue;
            }
            if (res->status == 404) throw NotFoundError("repository " + repo.str() + " not found");
            if (res->status < 200 || res->status >= 300) {
                throw TransportError("GET " + path + " returned HTTP " + std::to_string(res->status));
            }
            return *res;
        }
    }

    nlohmann::json get_json(const std::string& path, const RepoRef& repo) const {
        const auto res = get(path, repo);
        return detail::parse_json_text(res.body, "forge response");
    }

    static std::optional<std::string> next_link(const httplib::Response& res) {
        if (!res.has_header("Link")) return std::nullopt;
        const std::string link = res.get_header_value("Link");
        std::size_t pos = 0;
        while ((pos = link.find('<', pos)) != std::string::npos) {
            const auto close = link.find('>', pos);
            if (close == std::string::npos) break;
            const auto next_part = link.find(',', close);
            const auto params = link.substr(close, next_part == std::string::npos ? std::string::npos : next_part - close);
            if (params.find("rel=\"next\"") != std::string::npos) return link.substr(pos + 1, close - pos - 1);
            pos = close;
        }
        return std::nullopt;
    }

    std::vector<nlohmann::json> get_paginated(const std::string& path, const std::string& query,
                                              const RepoRef& repo) const {
        std::vector<nlohmann::json> items;
        std::string url = path + "?" + (query.empty() ? "" : query + "&") + "per_page=" +
                          std::to_string(options_.per_page) + "&page=1";
        for (int page = 1;; ++page) {
            const auto res = get(url, repo);
            const auto body = detail::parse_json_text(res.body, "forge response");
            if (!body.is_array()) throw TransportError("expected a JSON array from " + url);
            for (const auto& item : body) items.push_back(item);
            if (auto next = next_link(res)) {
                // Absolute links must stay on the configured origin.
                if (next->rfind(origin_, 0) == 0) *next = next->substr(origin_.size());
                if (next->empty() || next->front() != '/') throw TransportError("unexpected pagination link '" + *next + "'");
                url = *next;
                continue;
            }
            if (res.has_header("Link") || body.empty() || static_cast<int>(body.size()) < options_.per_page) break;
            url = path + "?" + (query.empty() ? "" : query + "&") + "per_page=" + std::to_string(options_.per_page) +
                  "&page=" + std::to_string(page + 1);
        }
        return items;
    }

    LiveProviderOptions options_;
    std::string origin_;
    std::string prefix_;
};

} // namespace depwatch
