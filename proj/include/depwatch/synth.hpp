#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "depwatch/activity.hpp"
#include "depwatch/canonical_json.hpp"
#include "depwatch/dataset.hpp"
#include "depwatch/date.hpp"
#include "depwatch/features.hpp"
#include "depwatch/labels.hpp"
#include "depwatch/provider.hpp"
#include "depwatch/rng.hpp"
#include "depwatch/snapshot.hpp"

namespace depwatch {

enum class Popularity : std::uint8_t { Low = 0, Medium = 1, High = 2 };

inline constexpr std::string_view popularity_name(Popularity p) {
    switch (p) {
    case Popularity::Low: return "low";
    case Popularity::Medium: return "medium";
    case Popularity::High: return "high";
    }
    return "low";
}

struct SynthConfig {
    std::uint64_t seed = 7;
    std::size_t n_libraries = 20;
    /// low / medium / high
    std::array<double, 3> popularity_mix{0.5, 0.3, 0.2};
    /// Active / FeatureComplete / Dormant / Inactive
    std::array<double, kLabelCount> label_mix{0.25, 0.25, 0.25, 0.25};
    /// Probability of each forward edge i -> j (i < j); the result is always a DAG.
    double edge_density = 0.1;
    /// Fraction of libraries whose history is drawn just across a rule boundary from their
    /// recorded label.
    double boundary_noise = 0.0;
    Date as_of = make_date(2024, 1, 1);
    std::string ecosystem = "npm";
    std::string host = "forge.example";
};

struct SyntheticEcosystem {
    Date as_of;
    DependencySnapshot snapshot;
    std::vector<ActivityTimeSeries> activities; // one per library, snapshot order
    std::map<LibraryId, MaintenanceLabel> truth;
    std::map<LibraryId, Popularity> popularity;
    std::vector<LibraryId> noisy;

    /// Feature vectors at `as_of` labeled by the rule table.
    LabeledDataset dataset() const {
        std::vector<FeatureVector> vectors;
        for (const auto& a : activities) vectors.push_back(compute_features(a, as_of));
        return label_dataset(vectors);
    }
};

namespace detail {

/// Largest-remainder apportionment of `n` items over `mix`; ties go to the lower index.
template <std::size_t K>
std::array<std::size_t, K> apportion(std::size_t n, const std::array<double, K>& mix) {
    std::array<std::size_t, K> counts{};
    std::array<double, K> rest{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < K; ++i) {
        const double exact = mix[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        rest[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    while (assigned < n) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < K; ++i) {
            if (rest[i] > rest[best] + 1e-12) best = i;
        }
        ++counts[best];
        rest[best] = -1.0;
        ++assigned;
    }
    return counts;
}

template <std::size_t K>
void check_mix(const std::array<double, K>& mix, const char* what) {
    double sum = 0.0;
    for (double m : mix) {
        if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError(std::string(what) + " mix has a negative or invalid share");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(std::string(what) + " mix must sum to 1");
}

/// What the generated history should look like at `as_of`.
struct Trajectory {
    int weeks_since_last_commit = 0;  // offset of the last week with commits
    bool archived = false;
    bool deprecated = false;
    bool stable = false;
    enum class Responses { Quick, Mixed, Slow, None } responses = Responses::Mixed;
};

inline Trajectory plan_trajectory(MaintenanceLabel label, int age_weeks, Rng& rng) {
    Trajectory t;
    const int oldest = std::max(60, age_weeks - 8);
    switch (label) {
    case MaintenanceLabel::Active:
        t.weeks_since_last_commit = static_cast<int>(rng.between(0, 5));
        t.responses = Trajectory::Responses::Quick;
        break;
    case MaintenanceLabel::Dormant:
        t.weeks_since_last_commit = static_cast<int>(rng.between(14, 51));
        t.responses = Trajectory::Responses::Mixed;
        break;
    case MaintenanceLabel::FeatureComplete:
        t.weeks_since_last_commit = static_cast<int>(rng.between(53, std::min(oldest, 200)));
        if (rng.chance(0.5)) {
            t.stable = true;
            t.responses = rng.chance(0.5) ? Trajectory::Responses::Quick : Trajectory::Responses::None;
        } else {
            t.responses = Trajectory::Responses::Quick;
        }
        break;
    case MaintenanceLabel::Inactive:
        switch (rng.index(3)) {
        case 0:
            t.archived = true;
            t.weeks_since_last_commit = static_cast<int>(rng.between(0, std::min(oldest, 150)));
            break;
        case 1:
            t.deprecated = true;
            t.weeks_since_last_commit = static_cast<int>(rng.between(0, std::min(oldest, 150)));
            break;
        default:
            t.weeks_since_last_commit = static_cast<int>(rng.between(53, std::min(oldest, 200)));
            t.responses = rng.chance(0.5) ? Trajectory::Responses::Slow : Trajectory::Responses::None;
            break;
        }
        break;
    }
    return t;
}

/// A history placed right across a rule boundary from `label`'s region.
inline Trajectory plan_boundary_trajectory(MaintenanceLabel label, Rng& rng) {
    Trajectory t;
    switch (label) {
    case MaintenanceLabel::Active: // looks Dormant: last commit 13-14 weeks back
        t.weeks_since_last_commit = static_cast<int>(rng.between(13, 14));
        t.responses = Trajectory::Responses::Quick;
        break;
    case MaintenanceLabel::Dormant: // looks Inactive: just over a year quiet, nobody answering
        t.weeks_since_last_commit = static_cast<int>(rng.between(53, 54));
        t.responses = Trajectory::Responses::Slow;
        break;
    case MaintenanceLabel::FeatureComplete: // looks Inactive: quiet and slow to respond
        t.weeks_since_last_commit = static_cast<int>(rng.between(53, 60));
        t.responses = Trajectory::Responses::Slow;
        break;
    case MaintenanceLabel::Inactive: // looks FeatureComplete: responsive standby community
        t.weeks_since_last_commit = static_cast<int>(rng.between(53, 60));
        t.responses = Trajectory::Responses::Quick;
        break;
    }
    return t;
}

inline ActivityTimeSeries realize(const RepoRef& repo, const Trajectory& t, Popularity pop, int age_weeks,
                                  Date as_of, Rng& rng) {
    const double rate_scale = pop == Popularity::High ? 4.0 : pop == Popularity::Medium ? 2.0 : 1.0;
    const int pool = static_cast<int>(pop == Popularity::High     ? rng.between(8, 25)
                                      : pop == Popularity::Medium ? rng.between(3, 8)
                                                                  : rng.between(1, 3));
    std::vector<double> author_weight(static_cast<std::size_t>(pool));
    double weight_sum = 0.0;
    for (int a = 0; a < pool; ++a) {
        author_weight[static_cast<std::size_t>(a)] = 1.0 / (1.0 + a); // Zipf-like
        weight_sum += author_weight[static_cast<std::size_t>(a)];
    }
    auto author_name = [&](int a) { return repo.name + "-dev" + std::to_string(a); };

    ActivityTimeSeries s;
    s.repo = repo;
    const Date first_week = as_of - std::chrono::days{7 * age_weeks};
    s.created_at = first_week + std::chrono::days{rng.index(7)};
    const double base_rate = rng.uniform(1.0, 6.0) * rate_scale;
    const double issue_rate = rng.uniform(0.1, 0.8) * rate_scale;
    std::uint64_t stars = pop == Popularity::High     ? static_cast<std::uint64_t>(rng.between(2000, 40000))
                          : pop == Popularity::Medium ? static_cast<std::uint64_t>(rng.between(100, 2000))
                                                      : static_cast<std::uint64_t>(rng.between(0, 100));
    const std::uint64_t star_step = std::max<std::uint64_t>(1, stars / 400);
    const int release_every = static_cast<int>(rng.between(6, 20));

    for (int w = 0; w <= age_weeks; ++w) {
        const int offset = age_weeks - w; // weeks before as_of
        WeekBucket b;
        b.week_start = first_week + std::chrono::days{7 * w};
        std::uint32_t commits = 0;
        if (offset == t.weeks_since_last_commit) {
            commits = 1 + rng.poisson(base_rate);
        } else if (offset > t.weeks_since_last_commit && rng.chance(0.75)) {
            commits = rng.poisson(base_rate);
        }
        for (std::uint32_t c = 0; c < commits; ++c) {
            double pick = rng.uniform() * weight_sum;
            int a = 0;
            while (a + 1 < pool && pick >= author_weight[static_cast<std::size_t>(a)]) {
                pick -= author_weight[static_cast<std::size_t>(a)];
                ++a;
            }
            ++b.authors[author_name(a)];
        }
        b.commits = commits;
        b.active_contributors = static_cast<std::uint32_t>(b.authors.size());
        const bool maintained = offset >= t.weeks_since_last_commit;
        b.issues_opened = rng.poisson(issue_rate);
        b.issues_closed = maintained ? std::min<std::uint32_t>(b.issues_opened + rng.poisson(0.2), rng.poisson(issue_rate) + 1)
                                     : (rng.chance(0.1) ? 1u : 0u);
        stars += maintained ? rng.index(star_step + 1) : (rng.chance(0.2) ? 1 : 0);
        b.stars_total = stars;
        if (maintained && commits > 0 && w % release_every == release_every - 1) s.releases.push_back(b.week_start + std::chrono::days{rng.index(5)});
        s.weeks.push_back(std::move(b));
    }
    std::erase_if(s.releases, [&](Date d) { return d > as_of; });

    const std::size_t n_samples = static_cast<std::size_t>(rng.between(3, 15));
    switch (t.responses) {
    case Trajectory::Responses::Quick:
        for (std::size_t i = 0; i < n_samples; ++i) s.issue_response_samples_hours.push_back(std::round(rng.uniform(1, 200) * 4) / 4);
        break;
    case Trajectory::Responses::Mixed:
        for (std::size_t i = 0; i < n_samples; ++i) s.issue_response_samples_hours.push_back(std::round(rng.uniform(1, 900) * 4) / 4);
        break;
    case Trajectory::Responses::Slow:
        for (std::size_t i = 0; i < n_samples; ++i) s.issue_response_samples_hours.push_back(std::round(rng.uniform(400, 3000) * 4) / 4);
        break;
    case Trajectory::Responses::None:
        break;
    }
    if (t.archived) {
        s.archived_at = as_of - std::chrono::days{rng.between(0, 7 * std::max(1, t.weeks_since_last_commit))};
        if (*s.archived_at < s.created_at) s.archived_at = s.created_at;
    }
    s.readme_deprecated = t.deprecated;
    s.readme_stable_declared = t.stable;
    return s;
}

} // namespace detail

/// Deterministic synthetic ecosystem: a random DAG of libraries whose activity histories
/// are drawn to satisfy their intended label's rule guard at `as_of`.
inline SyntheticEcosystem generate_synthetic_ecosystem(const SynthConfig& cfg) {
    if (cfg.n_libraries == 0) throw ValidationError("synthetic ecosystem needs at least one library");
    detail::check_mix(cfg.popularity_mix, "popularity");
    detail::check_mix(cfg.label_mix, "label");
    if (!(cfg.edge_density >= 0.0 && cfg.edge_density <= 1.0)) throw ValidationError("edge density must lie in [0, 1]");
    if (!(cfg.boundary_noise >= 0.0 && cfg.boundary_noise <= 1.0)) throw ValidationError("boundary noise must lie in [0, 1]");
    if (!is_registered_ecosystem(cfg.ecosystem)) throw ValidationError("unknown ecosystem '" + cfg.ecosystem + "'");

    Rng rng(cfg.seed);
    const auto label_counts = detail::apportion(cfg.n_libraries, cfg.label_mix);
    std::vector<MaintenanceLabel> labels;
    for (std::size_t k = 0; k < kLabelCount; ++k) labels.insert(labels.end(), label_counts[k], kAllLabels[k]);
    rng.shuffle(labels);
    const auto pop_counts = detail::apportion(cfg.n_libraries, cfg.popularity_mix);
    std::vector<Popularity> pops;
    for (std::size_t k = 0; k < 3; ++k) pops.insert(pops.end(), pop_counts[k], static_cast<Popularity>(k));
    rng.shuffle(pops);

    const int width = std::max<int>(4, static_cast<int>(std::to_string(cfg.n_libraries).size()));
    SyntheticEcosystem eco;
    eco.as_of = cfg.as_of;
    eco.snapshot.ecosystem = cfg.ecosystem;
    for (std::size_t i = 0; i < cfg.n_libraries; ++i) {
        std::string num = std::to_string(i);
        num.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(num.size(), static_cast<std::size_t>(width)), '0');
        LibraryRecord rec;
        rec.id = LibraryId{cfg.ecosystem, "lib-" + num, std::to_string(1 + rng.index(4)) + "." + std::to_string(rng.index(20)) + ".0"};
        rec.repo = RepoRef{cfg.host, "org-" + std::to_string(rng.index(12)), "lib-" + num};

        const int age_weeks = static_cast<int>(rng.between(110, 300));
        const bool noisy = rng.chance(cfg.boundary_noise);
        const auto plan = noisy ? detail::plan_boundary_trajectory(labels[i], rng)
                                : detail::plan_trajectory(labels[i], age_weeks, rng);
        eco.activities.push_back(detail::realize(*rec.repo, plan, pops[i], age_weeks, cfg.as_of, rng));
        eco.truth[rec.id] = labels[i];
        eco.popularity[rec.id] = pops[i];
        if (noisy) eco.noisy.push_back(rec.id);
        eco.snapshot.libraries.push_back(std::move(rec));
    }
    std::vector<bool> has_dependent(cfg.n_libraries, false);
    for (std::size_t i = 0; i < cfg.n_libraries; ++i) {
        for (std::size_t j = i + 1; j < cfg.n_libraries; ++j) {
            if (rng.chance(cfg.edge_density)) {
                eco.snapshot.libraries[i].deps.push_back(eco.snapshot.libraries[j].id);
                has_dependent[j] = true;
            }
        }
    }
    for (std::size_t i = 0; i < cfg.n_libraries; ++i) {
        if (!has_dependent[i]) eco.snapshot.roots.push_back(eco.snapshot.libraries[i].id);
    }
    eco.snapshot.validate();
    return eco;
}

inline nlohmann::json truth_to_json(const SyntheticEcosystem& eco, const SynthConfig& cfg) {
    nlohmann::json labels = nlohmann::json::object(), popularity = nlohmann::json::object();
    for (const auto& [id, l] : eco.truth) labels[id.str()] = label_name(l);
    for (const auto& [id, p] : eco.popularity) popularity[id.str()] = popularity_name(p);
    nlohmann::json noisy = nlohmann::json::array();
    for (const auto& id : eco.noisy) noisy.push_back(id.str());
    return {{"as_of", format_date(eco.as_of)},
            {"seed", cfg.seed},
            {"labels", std::move(labels)},
            {"popularity", std::move(popularity)},
            {"boundary_noise", noisy}};
}

/// Writes `snapshot.json`, `store/`, `truth.json` and `dataset.json` under `dir`.
inline void write_synthetic_ecosystem(const SyntheticEcosystem& eco, const SynthConfig& cfg,
                                      const std::filesystem::path& dir) {
    write_file(dir / "snapshot.json", serialize_snapshot(eco.snapshot));
    const OfflineStore store(dir / "store");
    for (const auto& a : eco.activities) store.store(a);
    write_file(dir / "truth.json", canonical_dump(truth_to_json(eco, cfg)));
    write_file(dir / "dataset.json", dataset_to_json(eco.dataset()).dump() + "\n");
}

struct GroundTruth {
    Date as_of;
    std::map<LibraryId, MaintenanceLabel> labels;
};

inline GroundTruth parse_truth(std::string_view text) {
    const auto doc = detail::parse_json_text(text, "truth file");
    GroundTruth t;
    t.as_of = parse_date(detail::require<std::string>(doc, "as_of", "truth"));
    const auto labels = detail::require<nlohmann::json>(doc, "labels", "truth");
    for (auto it = labels.begin(); it != labels.end(); ++it) {
        t.labels[LibraryId::parse(it.key())] = parse_label(it.value().get<std::string>());
    }
    return t;
}

} // namespace depwatch
