#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "depwatch/action.hpp"
#include "depwatch/activity.hpp"
#include "depwatch/effort.hpp"
#include "depwatch/error.hpp"
#include "depwatch/features.hpp"
#include "depwatch/forecast.hpp"
#include "depwatch/forest.hpp"
#include "depwatch/graph.hpp"
#include "depwatch/labeling.hpp"
#include "depwatch/live_provider.hpp"
#include "depwatch/propagate.hpp"
#include "depwatch/provider.hpp"
#include "depwatch/snapshot.hpp"

#ifndef DEPWATCH_VERSION
#define DEPWATCH_VERSION "0.0.0"
#endif

namespace depwatch {

inline constexpr std::string_view kToolVersion = DEPWATCH_VERSION;

enum class ReportFormat : std::uint8_t { Json, Text, Markdown };

inline ReportFormat parse_format(std::string_view text) {
    if (text == "json") return ReportFormat::Json;
    if (text == "text") return ReportFormat::Text;
    if (text == "markdown" || text == "md") return ReportFormat::Markdown;
    throw ValidationError("unknown report format '" + std::string(text) + "'");
}

inline Date today_utc() { return std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()); }

struct ScanConfig {
    std::filesystem::path snapshot;
    /// Exactly one of `store` (offline directory) and `api` (forge base URL).
    std::optional<std::filesystem::path> store;
    std::optional<std::string> api;
    std::string api_token;
    /// Defaults to today (UTC).
    std::optional<Date> as_of;
    std::vector<Horizon> horizons = all_horizons();
    /// Random forest model; without one the rule table labels libraries directly.
    std::optional<std::filesystem::path> model;
    bool rules_only = false;
    PropagationConfig propagation{.direction = Direction::Reversed};
    RiskWeights risk_weights;
    MaintenanceThresholds thresholds;
    VerdictOptions verdict;
    ForecastOptions forecast;
    LibraryContext default_context;
    /// Keyed by library id; an unversioned key matches every version.
    std::map<std::string, LibraryContext> contexts;
    bool prefer_continue_over_replace = false;
    std::optional<double> cost_per_review_hours;
    ReportFormat format = ReportFormat::Json;
    /// Activity older than this many days before as_of is not fetched.
    int lookback_days = 3650;
    std::size_t parallelism = 4;
    /// Replaces the snapshot roots when nonempty.
    std::vector<LibraryId> roots;

    void validate() const {
        if (snapshot.empty()) throw ValidationError("config: no snapshot given");
        if (store.has_value() == api.has_value()) {
            throw ValidationError("config: exactly one activity source (store or api) is required");
        }
        if (model && rules_only) throw ValidationError("config: a model and rules-only mode are mutually exclusive");
        for (auto h : horizons) Horizon::of(h.months);
        propagation.validate();
        if (lookback_days <= 0) throw ValidationError("config: lookback_days must be positive");
        if (parallelism == 0) throw ValidationError("config: parallelism must be positive");
        if (cost_per_review_hours && !(*cost_per_review_hours >= 0.0)) {
            throw ValidationError("config: cost_per_review_hours must be nonnegative");
        }
        if (forecast.fit_window < kMinFitObservations) {
            throw ValidationError("config: forecast fit_window must be at least " + std::to_string(kMinFitObservations));
        }
    }

    LibraryContext context_for(const LibraryId& id) const {
        if (auto it = contexts.find(id.str()); it != contexts.end()) return it->second;
        LibraryId bare = id;
        bare.version.reset();
        if (auto it = contexts.find(bare.str()); it != contexts.end()) return it->second;
        return default_context;
    }
};

struct HorizonEntry {
    int months = 0;
    Date as_of;
    MaintenanceLabel label = MaintenanceLabel::Active;
    LabelDistribution distribution;
};

struct ReportEntry {
    LibraryId id;
    std::optional<RepoRef> repo;
    bool root = false;
    bool data_available = true;
    MaintenanceLabel label = MaintenanceLabel::Active;
    LabelDistribution distribution;
    std::optional<FeatureVector> features;
    Verdict verdict = Verdict::Unsuspicious;
    std::vector<Culprit> culprits;
    double risk_score = 0.0;
    std::vector<HorizonEntry> forecasts;
    /// Only suspicious entries carry an action.
    std::optional<Action> action;
};

struct ReportSummary {
    std::size_t total = 0;
    std::array<std::size_t, kLabelCount> label_counts{};
    std::size_t suspicious = 0;
    EffortMetrics effort;
};

struct Report {
    std::string tool_version{kToolVersion};
    Date as_of;
    std::string classifier = "rules";
    std::vector<int> horizons;
    /// Sorted by id.
    std::vector<ReportEntry> entries;
    ReportSummary summary;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;

    const ReportEntry* find(const LibraryId& id) const {
        for (const auto& e : entries) {
            if (e.id == id) return &e;
        }
        return nullptr;
    }
};

/// Exit status for CI: 0 clean, 1 at least one suspicious library.
inline int exit_code(const Report& report) { return report.summary.suspicious > 0 ? 1 : 0; }

inline ReportSummary summarize(const std::vector<ReportEntry>& entries, std::optional<double> cost_per_review = {}) {
    ReportSummary s;
    s.total = entries.size();
    for (const auto& e : entries) {
        ++s.label_counts[label_index(e.label)];
        if (e.verdict == Verdict::Suspicious) ++s.suspicious;
    }
    s.effort = effort_metrics(s.total, s.suspicious, {}, cost_per_review);
    return s;
}

/// A report together with the graph it was computed on.
struct ScanResult {
    Report report;
    DependencyGraph graph;
};

namespace detail {

inline std::unique_ptr<ActivityProvider> make_provider(const ScanConfig& config) {
    if (config.store) return std::make_unique<OfflineStore>(*config.store);
    LiveProviderOptions options;
    options.base_url = *config.api;
    options.token = config.api_token;
    return std::make_unique<LiveProvider>(std::move(options));
}

} // namespace detail

/// The full pipeline on an already parsed snapshot and an activity provider.
inline ScanResult scan_snapshot(const DependencySnapshot& snapshot, const ActivityProvider& provider,
                                const ScanConfig& config, const Classifier* model = nullptr,
                                std::vector<std::string> warnings = {}) {
    snapshot.validate();
    const Date as_of = config.as_of.value_or(today_utc());
    auto built = build_graph(snapshot);
    for (auto& w : built.warnings) warnings.push_back(std::move(w));

    const auto& roots = config.roots.empty() ? snapshot.roots : config.roots;
    const std::set<LibraryId> root_set(roots.begin(), roots.end());
    ScanResult result;
    result.graph = closure_subgraph(built.graph, roots);
    const auto& graph = result.graph;

    Report& report = result.report;
    report.as_of = as_of;
    report.classifier = model ? "random_forest" : "rules";
    for (auto h : config.horizons) report.horizons.push_back(h.months);
    report.notes.push_back("forecasts assume the dependency graph stays as it is at as_of");

    // Fetch each distinct repository once.
    std::vector<RepoRef> repos;
    for (const auto& id : graph.nodes()) {
        const auto* rec = snapshot.find(id);
        if (rec && rec->repo && std::find(repos.begin(), repos.end(), *rec->repo) == repos.end()) {
            repos.push_back(*rec->repo);
        }
    }
    const DateRange window{as_of - std::chrono::days{config.lookback_days}, as_of};
    const auto outcomes = fetch_all(provider, repos, window, {.parallelism = config.parallelism});
    std::map<RepoRef, const FetchOutcome*> by_repo;
    for (const auto& o : outcomes) by_repo[o.repo] = &o;

    const Labeler labeler = model ? model_labeler(*model) : rules_labeler(config.thresholds);
    std::map<LibraryId, const ActivityTimeSeries*> activity;
    std::map<LibraryId, MaintenanceLabel> labels;
    for (const auto& id : graph.nodes()) {
        ReportEntry e;
        e.id = id;
        e.root = root_set.count(id) > 0;
        const auto* rec = snapshot.find(id);
        if (rec) e.repo = rec->repo;
        std::string missing;
        const ActivityTimeSeries* series = nullptr;
        if (!e.repo) {
            missing = "no repository reference";
        } else {
            const auto* outcome = by_repo.at(*e.repo);
            if (outcome->activity) {
                series = &*outcome->activity;
            } else {
                missing = outcome->error;
            }
        }
        if (series) {
            try {
                e.features = compute_features(*series, as_of, config.thresholds);
            } catch (const DomainError& err) {
                missing = err.what();
                series = nullptr;
            }
        }
        if (series) {
            e.distribution = labeler(*e.features);
            e.label = e.distribution.argmax();
            activity[id] = series;
        } else {
            e.data_available = false;
            e.label = MaintenanceLabel::Inactive;
            e.distribution = LabelDistribution::one_hot(MaintenanceLabel::Inactive);
            warnings.push_back(id.str() + ": no data (" + missing + "), labeled inactive");
        }
        labels[id] = e.label;
        report.entries.push_back(std::move(e));
    }

    if (!graph.empty()) {
        const auto risk = activity_risk(graph, labels, config.propagation, config.risk_weights);
        if (!risk.converged) warnings.push_back("risk propagation did not converge");
        const auto verdicts = aggregate_verdicts(graph, labels, risk, config.verdict);
        for (std::size_t i = 0; i < verdicts.size(); ++i) {
            auto& e = report.entries[i];
            e.verdict = verdicts[i].verdict;
            e.culprits = verdicts[i].culprits;
            e.risk_score = verdicts[i].risk_score;
            if (e.verdict == Verdict::Suspicious) {
                e.action = recommend_action(config.context_for(e.id), config.prefer_continue_over_replace);
            }
        }
    }

    if (!config.horizons.empty()) {
        for (auto& e : report.entries) {
            const auto it = activity.find(e.id);
            if (it == activity.end()) continue;
            try {
                for (const auto& f : forecast_labels(*it->second, as_of, labeler, config.horizons, config.forecast,
                                                     config.thresholds)) {
                    e.forecasts.push_back({f.horizon.months, f.as_of, f.label, f.distribution});
                }
            } catch (const FitError& err) {
                warnings.push_back(e.id.str() + ": no forecast (" + err.what() + ")");
            }
        }
    }

    report.summary = summarize(report.entries, config.cost_per_review_hours);
    report.warnings = std::move(warnings);
    return result;
}

namespace detail {

inline std::optional<Classifier> load_model(const ScanConfig& config) {
    if (!config.model) return std::nullopt;
    return parse_classifier(read_file(*config.model));
}

} // namespace detail

/// parse -> graph -> fetch -> features -> classify -> verdicts + risk -> forecasts -> actions.
inline ScanResult scan(const ScanConfig& config) {
    config.validate();
    std::vector<std::string> warnings;
    const auto snapshot = parse_snapshot(read_file(config.snapshot), &warnings);
    const auto provider = detail::make_provider(config);
    const auto model = detail::load_model(config);
    return scan_snapshot(snapshot, *provider, config, model ? &*model : nullptr, std::move(warnings));
}

inline Report run_scan(const ScanConfig& config) { return scan(config).report; }

/// Snapshot libraries matching `query`. An unversioned query matches every version.
inline std::vector<LibraryId> resolve_library(const DependencySnapshot& snapshot, const LibraryId& query) {
    std::vector<LibraryId> out;
    for (const auto& lib : snapshot.libraries) {
        const bool match = query.version ? lib.id == query
                                         : lib.id.ecosystem == query.ecosystem && lib.id.name == query.name;
        if (match) out.push_back(lib.id);
    }
    return out;
}

/// One id per line; blank lines and `#` comments are skipped.
inline std::vector<std::string> parse_id_list(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(b, e - b + 1));
    }
    return out;
}

/// The scan pipeline rooted at the given libraries instead of the snapshot roots.
inline ScanResult scan_libraries(const std::vector<std::string>& ids, ScanConfig config) {
    config.validate();
    if (ids.empty()) throw ValidationError("no library ids given");
    std::vector<std::string> warnings;
    const auto snapshot = parse_snapshot(read_file(config.snapshot), &warnings);
    config.roots.clear();
    std::vector<std::string> unknown;
    for (const auto& text : ids) {
        const auto found = resolve_library(snapshot, LibraryId::parse(text));
        if (found.empty()) unknown.push_back(text);
        config.roots.insert(config.roots.end(), found.begin(), found.end());
    }
    if (!unknown.empty()) {
        std::string names;
        for (const auto& u : unknown) names += (names.empty() ? "'" : ", '") + u + "'";
        throw NotFoundError("unknown " + std::string(unknown.size() == 1 ? "library " : "libraries ") + names);
    }
    std::sort(config.roots.begin(), config.roots.end());
    config.roots.erase(std::unique(config.roots.begin(), config.roots.end()), config.roots.end());
    const auto provider = detail::make_provider(config);
    const auto model = detail::load_model(config);
    return scan_snapshot(snapshot, *provider, config, model ? &*model : nullptr, std::move(warnings));
}

inline Report scan_single(const std::vector<std::string>& ids, const ScanConfig& config) {
    return scan_libraries(ids, config).report;
}

inline Report scan_single(const std::string& id, const ScanConfig& config) {
    return scan_single(std::vector<std::string>{id}, config);
}

namespace detail {

template <class T>
void read_opt(const nlohmann::json& obj, const char* key, T& out, std::string_view context) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string(context) + ": key '" + key + "' has the wrong type");
    }
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                                std::string_view context) {
    if (!obj.is_object()) throw ValidationError(std::string(context) + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw ValidationError(std::string(context) + ": unknown key '" + it.key() + "'");
        }
    }
}

inline LibraryContext context_from_json(const nlohmann::json& j, LibraryContext base, std::string_view context) {
    reject_unknown_keys(j, {"security_relevant", "alternatives_exist"}, context);
    read_opt(j, "security_relevant", base.security_relevant, context);
    read_opt(j, "alternatives_exist", base.alternatives_exist, context);
    return base;
}

} // namespace detail

/// Reads a JSON config file. Relative paths resolve against `base_dir`.
inline ScanConfig parse_scan_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
    const auto doc = detail::parse_json_text(text, "config");
    detail::reject_unknown_keys(doc,
                                {"snapshot", "store", "api", "as_of", "horizons", "model", "rules_only",
                                 "propagation", "risk_weights", "thresholds", "feature_complete_is_negative",
                                 "forecast", "defaults", "libraries", "prefer_continue_over_replace",
                                 "cost_per_review_hours", "format", "lookback_days", "parallelism"},
                                "config");
    ScanConfig c;
    auto path = [&](const char* key) -> std::optional<std::filesystem::path> {
        if (!doc.contains(key)) return std::nullopt;
        std::filesystem::path p = detail::require<std::string>(doc, key, "config");
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    if (auto p = path("snapshot")) c.snapshot = *p;
    c.store = path("store");
    c.model = path("model");
    if (doc.contains("api")) c.api = detail::require<std::string>(doc, "api", "config");
    if (doc.contains("as_of")) c.as_of = parse_date(detail::require<std::string>(doc, "as_of", "config"));
    if (doc.contains("horizons")) {
        c.horizons.clear();
        for (int m : detail::require<std::vector<int>>(doc, "horizons", "config")) c.horizons.push_back(Horizon::of(m));
    }
    detail::read_opt(doc, "rules_only", c.rules_only, "config");
    if (doc.contains("propagation")) {
        const auto& p = doc.at("propagation");
        detail::reject_unknown_keys(p, {"damping", "tolerance", "max_iterations", "direction"}, "config.propagation");
        detail::read_opt(p, "damping", c.propagation.damping, "config.propagation");
        detail::read_opt(p, "tolerance", c.propagation.tolerance, "config.propagation");
        detail::read_opt(p, "max_iterations", c.propagation.max_iterations, "config.propagation");
        if (p.contains("direction")) {
            const auto d = detail::require<std::string>(p, "direction", "config.propagation");
            if (d == "reversed") c.propagation.direction = Direction::Reversed;
            else if (d == "as_is") c.propagation.direction = Direction::AsIs;
            else throw ValidationError("config.propagation: unknown direction '" + d + "'");
        }
    }
    if (doc.contains("risk_weights")) {
        const auto& w = doc.at("risk_weights");
        detail::reject_unknown_keys(w, {"active", "feature_complete", "dormant", "inactive"}, "config.risk_weights");
        detail::read_opt(w, "active", c.risk_weights.active, "config.risk_weights");
        detail::read_opt(w, "feature_complete", c.risk_weights.feature_complete, "config.risk_weights");
        detail::read_opt(w, "dormant", c.risk_weights.dormant, "config.risk_weights");
        detail::read_opt(w, "inactive", c.risk_weights.inactive, "config.risk_weights");
    }
    if (doc.contains("thresholds")) {
        const auto& t = doc.at("thresholds");
        detail::reject_unknown_keys(t, {"active_days", "dormant_days", "responsive_hours", "core_share"},
                                    "config.thresholds");
        detail::read_opt(t, "active_days", c.thresholds.active_days, "config.thresholds");
        detail::read_opt(t, "dormant_days", c.thresholds.dormant_days, "config.thresholds");
        detail::read_opt(t, "responsive_hours", c.thresholds.responsive_hours, "config.thresholds");
        detail::read_opt(t, "core_share", c.thresholds.core_share, "config.thresholds");
    }
    detail::read_opt(doc, "feature_complete_is_negative", c.verdict.feature_complete_is_negative, "config");
    if (doc.contains("forecast")) {
        const auto& f = doc.at("forecast");
        detail::reject_unknown_keys(f, {"method", "fit_window"}, "config.forecast");
        if (f.contains("method")) c.forecast.method = parse_method(detail::require<std::string>(f, "method", "config.forecast"));
        detail::read_opt(f, "fit_window", c.forecast.fit_window, "config.forecast");
    }
    if (doc.contains("defaults")) c.default_context = detail::context_from_json(doc.at("defaults"), {}, "config.defaults");
    if (doc.contains("libraries")) {
        const auto& libs = doc.at("libraries");
        if (!libs.is_object()) throw ValidationError("config.libraries must be an object");
        for (auto it = libs.begin(); it != libs.end(); ++it) {
            const auto id = LibraryId::parse(it.key());
            c.contexts[id.str()] = detail::context_from_json(it.value(), c.default_context, "config.libraries." + it.key());
        }
    }
    detail::read_opt(doc, "prefer_continue_over_replace", c.prefer_continue_over_replace, "config");
    if (doc.contains("cost_per_review_hours")) {
        c.cost_per_review_hours = detail::require<double>(doc, "cost_per_review_hours", "config");
    }
    if (doc.contains("format")) c.format = parse_format(detail::require<std::string>(doc, "format", "config"));
    detail::read_opt(doc, "lookback_days", c.lookback_days, "config");
    detail::read_opt(doc, "parallelism", c.parallelism, "config");
    return c;
}

} // namespace depwatch
