#include <gtest/gtest.h>

#include "depwatch/dataset.hpp"
#include "depwatch/features.hpp"
#include "depwatch/labeling.hpp"
#include "depwatch/provider.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace depwatch {
namespace {

const RepoRef kRepoA{"forge.example", "acme", "repoA"};

ActivityTimeSeries load_repo_a() { return OfflineStore(testing::fixture("store")).load(kRepoA); }

/// Weekly series starting at `first` with the given commit counts, all by `author`.
ActivityTimeSeries simple_series(Date first, const std::vector<std::uint32_t>& commits,
                                 const std::string& author = "dev") {
    ActivityTimeSeries a;
    a.repo = {"forge.example", "test", "simple"};
    a.created_at = first;
    for (std::size_t i = 0; i < commits.size(); ++i) {
        WeekBucket w;
        w.week_start = first + std::chrono::days{7 * static_cast<int>(i)};
        w.commits = commits[i];
        if (commits[i]) {
            w.authors[author] = commits[i];
            w.active_contributors = 1;
        }
        a.weeks.push_back(w);
    }
    return a;
}

TEST(OfflineStore, LoadsFixtureAndRoundTripsBytes) {
    const auto series = load_repo_a();
    EXPECT_EQ(series.weeks.size(), 62u);
    EXPECT_EQ(series.created_at, make_date(2021, 3, 15));
    EXPECT_EQ(series.releases.size(), 4u);
    const auto original = read_file(testing::fixture("store/forge.example/acme/repoA.activity.json"));
    EXPECT_EQ(serialize_activity(series), original);
}

TEST(OfflineStore, FetchWindowCoveringDataIsExact) {
    const auto series = load_repo_a();
    const auto fetched = fetch_activity(OfflineStore(testing::fixture("store")), kRepoA,
                                        {series.weeks.front().week_start, series.weeks.back().week_start});
    EXPECT_EQ(fetched, series);
}

TEST(OfflineStore, MissingRepoIsNotFound) {
    EXPECT_THROW(fetch_activity(OfflineStore(testing::fixture("store")), {"forge.example", "acme", "nope"},
                                {make_date(2023, 1, 2), make_date(2023, 6, 5)}),
                 NotFoundError);
}

TEST(OfflineStore, StoreThenLoad) {
    testing::TempDir dir;
    OfflineStore store(dir.path());
    auto series = load_repo_a();
    series.repo = {"forge.example", "elsewhere", "copy"};
    store.store(series);
    EXPECT_EQ(store.load(series.repo), series);
}

TEST(ClipToWindow, PadsMissingWeeksWithZeroCounts) {
    auto series = simple_series(make_date(2023, 1, 2), {1, 2, 3});
    series.weeks[2].stars_total = 40;
    const auto clipped = clip_to_window(series, {make_date(2022, 12, 1), make_date(2023, 2, 1)});
    // Never before the creation week; through the week containing Feb 1st.
    ASSERT_EQ(clipped.weeks.size(), 5u);
    EXPECT_EQ(clipped.weeks.front().week_start, make_date(2023, 1, 2));
    EXPECT_EQ(clipped.weeks.back().week_start, make_date(2023, 1, 30));
    EXPECT_EQ(clipped.weeks[3].commits, 0u);
    EXPECT_EQ(clipped.weeks[3].stars_total, 40u);
    EXPECT_NO_THROW(clipped.validate());
}

TEST(ActivityValidation, RejectsGapsAndBadAttribution) {
    auto gap = simple_series(make_date(2023, 1, 2), {1, 1, 1});
    gap.weeks.erase(gap.weeks.begin() + 1);
    EXPECT_THROW(gap.validate(), ValidationError);

    auto unattributed = simple_series(make_date(2023, 1, 2), {2});
    unattributed.weeks[0].authors.clear();
    EXPECT_THROW(unattributed.validate(), ValidationError);

    auto not_monday = simple_series(make_date(2023, 1, 3), {1});
    EXPECT_THROW(not_monday.validate(), ValidationError);

    const char* negative = R"({"repo": {"host": "h", "owner": "o", "name": "n"}, "created_at": "2023-01-02",
      "weeks": [{"week_start": "2023-01-02", "commits": -1}]})";
    EXPECT_THROW(parse_activity(negative), ValidationError);
}

TEST(ComputeFeatures, RepoAHandCountedWindows) {
    const auto fv = compute_features(load_repo_a(), make_date(2023, 6, 5));
    // Independent tallies of the fixture buckets with week_start in [as_of - N days, as_of].
    EXPECT_EQ(fv[Feature::commits_90d], 44);
    EXPECT_EQ(fv[Feature::commits_30d], 16);
    EXPECT_EQ(fv[Feature::commits_365d], 176);
    EXPECT_EQ(fv[Feature::days_since_last_commit], 0);
    EXPECT_EQ(fv[Feature::contributors_365d], 3);
    EXPECT_EQ(fv[Feature::project_age_days], 812);
    EXPECT_EQ(fv[Feature::days_since_last_release], 14);
    EXPECT_EQ(fv[Feature::median_issue_response_hours], 12.0);
    EXPECT_EQ(fv[Feature::archived], 0);
}

TEST(ComputeFeatures, AsOfLastCommitGivesZeroDays) {
    const auto series = simple_series(make_date(2023, 1, 2), {0, 3, 0, 5, 0, 0});
    EXPECT_EQ(compute_features(series, make_date(2023, 1, 23))[Feature::days_since_last_commit], 0);
    EXPECT_EQ(compute_features(series, make_date(2023, 2, 6))[Feature::days_since_last_commit], 14);
}

TEST(ComputeFeatures, AsOfBeforeCreationIsDomainError) {
    const auto series = simple_series(make_date(2023, 1, 2), {1});
    EXPECT_THROW(compute_features(series, make_date(2022, 12, 31)), DomainError);
}

TEST(ComputeFeatures, SingleContributorIsTheCore) {
    const auto series = simple_series(make_date(2023, 1, 2), {4, 4, 4});
    EXPECT_EQ(compute_features(series, make_date(2023, 1, 16))[Feature::core_contributors_365d], 1);
}

TEST(ComputeFeatures, CoreContributorsEightyPercentRule) {
    auto with_authors = [](std::map<std::string, std::uint32_t> authors) {
        auto s = simple_series(make_date(2023, 1, 2), {0});
        std::uint32_t total = 0;
        for (const auto& [_, n] : authors) total += n;
        s.weeks[0].commits = total;
        s.weeks[0].authors = authors;
        s.weeks[0].active_contributors = static_cast<std::uint32_t>(authors.size());
        return compute_features(s, make_date(2023, 1, 2))[Feature::core_contributors_365d];
    };
    EXPECT_EQ(with_authors({{"a", 8}, {"b", 1}, {"c", 1}}), 1);
    EXPECT_EQ(with_authors({{"a", 5}, {"b", 5}}), 2);
    // 4 + 3 = 7 < 8, so a third author is needed.
    EXPECT_EQ(with_authors({{"a", 4}, {"b", 3}, {"c", 3}}), 3);
    EXPECT_EQ(with_authors({{"a", 6}, {"b", 2}, {"c", 2}}), 2);
}

TEST(ComputeFeatures, MissingResponseDataAndIssueRatioDefaults) {
    const auto series = simple_series(make_date(2023, 1, 2), {1});
    const auto fv = compute_features(series, make_date(2023, 1, 2));
    EXPECT_EQ(fv[Feature::median_issue_response_hours], kNoData);
    EXPECT_EQ(fv[Feature::issue_close_ratio_365d], 1.0);

    auto even = series;
    even.issue_response_samples_hours = {10, 2, 30, 4};
    EXPECT_EQ(compute_features(even, make_date(2023, 1, 2))[Feature::median_issue_response_hours], 7.0);
}

TEST(ComputeFeatures, NoCommitsEverFallsBackToAge) {
    const auto series = simple_series(make_date(2023, 1, 2), {0, 0, 0});
    const auto fv = compute_features(series, make_date(2023, 1, 20));
    EXPECT_EQ(fv[Feature::days_since_last_commit], 18);
    EXPECT_EQ(fv[Feature::days_since_last_release], 18);
}

TEST(ComputeFeatures, ArchivedOnlyOnceArchiveDatePassed) {
    auto series = simple_series(make_date(2023, 1, 2), {1, 1, 1});
    series.archived_at = make_date(2023, 1, 10);
    EXPECT_EQ(compute_features(series, make_date(2023, 1, 9))[Feature::archived], 0);
    EXPECT_EQ(compute_features(series, make_date(2023, 1, 10))[Feature::archived], 1);
}

TEST(ComputeFeatures, MonotoneInRecentCommitsAndWindowsNest) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint32_t> commits(20 + rng.index(80));
        for (auto& c : commits) c = rng.chance(0.4) ? static_cast<std::uint32_t>(rng.index(9)) : 0;
        const auto series = simple_series(make_date(2021, 1, 4), commits);
        const Date as_of = series.weeks.back().week_start + std::chrono::days{rng.index(7)};
        const auto base = compute_features(series, as_of);
        ASSERT_LE(base[Feature::commits_30d], base[Feature::commits_90d]);
        ASSERT_LE(base[Feature::commits_90d], base[Feature::commits_365d]);

        auto bumped = series;
        auto& w = bumped.weeks[bumped.weeks.size() - 1 - rng.index(3)];
        ++w.commits;
        if (++w.authors["dev"] == 1) {
            w.active_contributors = 1;
        }
        const auto after = compute_features(bumped, as_of);
        ASSERT_EQ(after[Feature::commits_30d], base[Feature::commits_30d] + 1);
        ASSERT_EQ(after[Feature::project_age_days], base[Feature::project_age_days]);
    }
}

FeatureVector vector_with(std::initializer_list<std::pair<Feature, double>> values) {
    FeatureVector fv;
    for (auto [f, v] : values) fv[f] = v;
    return fv;
}

TEST(LabelingStrategy, ArchivedIsInactive) {
    auto fv = vector_with({{Feature::archived, 1}, {Feature::commits_90d, 50}, {Feature::days_since_last_commit, 1}});
    EXPECT_EQ(apply_labeling_strategy(fv), MaintenanceLabel::Inactive);
    EXPECT_EQ(labeling_decision(fv).rule, LabelRule::Retired);
}

TEST(LabelingStrategy, StableLongQuietIsFeatureComplete) {
    auto fv = vector_with({{Feature::days_since_last_commit, 540},
                           {Feature::median_issue_response_hours, 120},
                           {Feature::readme_stable_declared, 1}});
    EXPECT_EQ(apply_labeling_strategy(fv), MaintenanceLabel::FeatureComplete);
}

TEST(LabelingStrategy, RecentCommitsAreActive) {
    auto fv = vector_with({{Feature::commits_90d, 25}, {Feature::days_since_last_commit, 3}});
    EXPECT_EQ(apply_labeling_strategy(fv), MaintenanceLabel::Active);
}

TEST(LabelingStrategy, RuleBoundaries) {
    auto dormant = vector_with({{Feature::days_since_last_commit, 91}, {Feature::commits_365d, 2}});
    EXPECT_EQ(apply_labeling_strategy(dormant), MaintenanceLabel::Dormant);
    dormant[Feature::days_since_last_commit] = 365;
    EXPECT_EQ(apply_labeling_strategy(dormant), MaintenanceLabel::Dormant);

    auto silent = vector_with({{Feature::days_since_last_commit, 400}, {Feature::median_issue_response_hours, kNoData}});
    EXPECT_EQ(apply_labeling_strategy(silent), MaintenanceLabel::Inactive);
    silent[Feature::median_issue_response_hours] = 336;
    EXPECT_EQ(apply_labeling_strategy(silent), MaintenanceLabel::FeatureComplete);
    silent[Feature::median_issue_response_hours] = 337;
    EXPECT_EQ(apply_labeling_strategy(silent), MaintenanceLabel::Inactive);

    MaintenanceThresholds strict;
    strict.responsive_hours = 24;
    silent[Feature::median_issue_response_hours] = 100;
    EXPECT_EQ(apply_labeling_strategy(silent, strict), MaintenanceLabel::Inactive);
}

TEST(LabelingStrategy, GuardsPartitionFeatureSpace) {
    Rng rng(17);
    for (int i = 0; i < 20000; ++i) {
        const auto fv = testing::oracles::random_labeling_vector(rng);
        const auto guards = rule_guards(fv);
        const auto decision = labeling_decision(fv);
        std::size_t first = 0;
        while (!guards[first]) ++first;
        ASSERT_EQ(static_cast<std::size_t>(decision.rule), first);
        // Fallback fires exactly when nothing else does.
        ASSERT_EQ(guards[4], !(guards[0] || guards[1] || guards[2] || guards[3]));
        ASSERT_EQ(apply_labeling_strategy(fv), decision.label);
        if (fv.flag(Feature::archived)) {
            ASSERT_EQ(decision.label, MaintenanceLabel::Inactive);
        }
    }
}

TEST(LabelDataset, SingleVector) {
    const auto ds = label_dataset({vector_with({{Feature::commits_90d, 5}, {Feature::days_since_last_commit, 2}})});
    EXPECT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds.histogram(), (LabelHistogram{1, 0, 0, 0}));
}

TEST(LabelDataset, EmptyIsValidationError) { EXPECT_THROW(label_dataset({}), ValidationError); }

TEST(LabelDataset, SchemaMismatchIsValidationError) {
    auto fv = vector_with({});
    fv.schema_version = 2;
    EXPECT_THROW(label_dataset({vector_with({}), fv}), ValidationError);
}

TEST(LabelDataset, TenPerStateSynthetic) {
    Rng rng(40);
    std::vector<FeatureVector> vectors;
    for (int i = 0; i < 10; ++i) {
        auto active = testing::oracles::random_labeling_vector(rng);
        active[Feature::archived] = active[Feature::readme_deprecated] = 0;
        active[Feature::commits_90d] = 1 + static_cast<double>(rng.index(30));
        active[Feature::days_since_last_commit] = static_cast<double>(rng.index(91));
        vectors.push_back(active);

        auto fc = testing::oracles::random_labeling_vector(rng);
        fc[Feature::archived] = fc[Feature::readme_deprecated] = 0;
        fc[Feature::days_since_last_commit] = 366 + static_cast<double>(rng.index(1000));
        fc[Feature::readme_stable_declared] = 1;
        vectors.push_back(fc);

        auto dormant = testing::oracles::random_labeling_vector(rng);
        dormant[Feature::archived] = dormant[Feature::readme_deprecated] = 0;
        dormant[Feature::days_since_last_commit] = 91 + static_cast<double>(rng.index(275));
        dormant[Feature::commits_365d] = 1 + static_cast<double>(rng.index(20));
        vectors.push_back(dormant);

        auto inactive = testing::oracles::random_labeling_vector(rng);
        inactive[Feature::archived] = 1;
        vectors.push_back(inactive);
    }
    const auto ds = label_dataset(vectors);
    EXPECT_EQ(ds.histogram(), (LabelHistogram{10, 10, 10, 10}));
}

TEST(Dataset, JsonRoundTripAndSchemaCheck) {
    const auto ds = label_dataset({vector_with({{Feature::commits_90d, 5}, {Feature::days_since_last_commit, 2}}),
                                   vector_with({{Feature::archived, 1}})});
    const auto text = dataset_to_json(ds).dump();
    const auto back = parse_dataset(text);
    EXPECT_EQ(back.features, ds.features);
    EXPECT_EQ(back.labels, ds.labels);

    auto doc = dataset_to_json(ds);
    doc["schema"]["features"][0] = "commits_7d";
    EXPECT_THROW(parse_dataset(doc.dump()), ValidationError);
}

class CountingProvider final : public ActivityProvider {
public:
    ActivityTimeSeries fetch(const RepoRef& repo, DateRange) const override {
        if (repo.name == "missing") throw NotFoundError("missing");
        ++calls;
        auto a = simple_series(make_date(2023, 1, 2), {1});
        a.repo = repo;
        return a;
    }
    mutable std::atomic<int> calls{0};
};

TEST(FetchAll, BoundedParallelFetchKeepsOrderAndCapturesErrors) {
    CountingProvider provider;
    std::vector<RepoRef> repos;
    for (int i = 0; i < 12; ++i) repos.push_back({"h", "o", i == 5 ? "missing" : "r" + std::to_string(i)});
    TokenBucket bucket(4, 1000);
    const auto results = fetch_all(provider, repos, {make_date(2023, 1, 2), make_date(2023, 1, 2)}, {3, &bucket});
    ASSERT_EQ(results.size(), repos.size());
    EXPECT_EQ(provider.calls.load(), 11);
    for (std::size_t i = 0; i < repos.size(); ++i) {
        EXPECT_EQ(results[i].repo, repos[i]);
        EXPECT_EQ(results[i].activity.has_value(), i != 5);
    }
    EXPECT_FALSE(results[5].error.empty());
}

} // namespace
} // namespace depwatch
