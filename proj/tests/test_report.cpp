#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "depwatch/action.hpp"
#include "depwatch/effort.hpp"
#include "depwatch/evaluate.hpp"
#include "depwatch/render.hpp"
#include "depwatch/scan.hpp"
#include "depwatch/synth.hpp"
#include "test_support.hpp"

namespace depwatch {
namespace {

using testing::fixture;
using testing::TempDir;

SuspicionVerdict suspicious_verdict() {
    SuspicionVerdict v;
    v.node = LibraryId::parse("npm:x@1.0.0");
    v.self_label = MaintenanceLabel::Dormant;
    v.verdict = Verdict::Suspicious;
    return v;
}

TEST(Action, DecisionTable) {
    const auto v = suspicious_verdict();
    EXPECT_EQ(recommend_action(v, {.security_relevant = false, .alternatives_exist = false}), Action::IgnoreWarnings);
    EXPECT_EQ(recommend_action(v, {.security_relevant = false, .alternatives_exist = true}), Action::IgnoreWarnings);
    EXPECT_EQ(recommend_action(v, {.security_relevant = true, .alternatives_exist = true}), Action::Replacement);
    EXPECT_EQ(recommend_action(v, {.security_relevant = true, .alternatives_exist = false}),
              Action::ContinueDevelopment);
}

TEST(Action, PreferContinueOverride) {
    const auto v = suspicious_verdict();
    EXPECT_EQ(recommend_action(v, {true, true}, true), Action::ContinueDevelopment);
    EXPECT_EQ(recommend_action(v, {false, true}, true), Action::IgnoreWarnings);
    EXPECT_EQ(recommend_action(v, {true, false}, true), Action::ContinueDevelopment);
}

TEST(Action, UnsuspiciousHasNoAction) {
    auto v = suspicious_verdict();
    v.verdict = Verdict::Unsuspicious;
    EXPECT_THROW(recommend_action(v, {}), ValidationError);
}

TEST(Effort, WorkedExample) {
    const auto m = effort_metrics(150, 15, EffortTruth{20, 15});
    EXPECT_DOUBLE_EQ(m.effort_reduction, 0.90);
    EXPECT_DOUBLE_EQ(*m.recall, 0.75);
    EXPECT_DOUBLE_EQ(*m.precision, 1.0);
}

TEST(Effort, EverythingReported) {
    const auto m = effort_metrics(100, 100, EffortTruth{10, 10});
    EXPECT_EQ(m.effort_reduction, 0.0);
    EXPECT_EQ(*m.recall, 1.0);
    EXPECT_DOUBLE_EQ(*m.precision, 0.1);
}

TEST(Effort, NothingReported) {
    const auto m = effort_metrics(40, 0);
    EXPECT_EQ(m.effort_reduction, 1.0);
    EXPECT_FALSE(m.recall);
    EXPECT_FALSE(m.precision);
    const auto t = effort_metrics(40, 0, EffortTruth{5, 0});
    EXPECT_EQ(*t.precision, 1.0);
    EXPECT_EQ(*t.recall, 0.0);
}

TEST(Effort, EmptyScanAndNoTrueSuspicious) {
    EXPECT_EQ(effort_metrics(0, 0).effort_reduction, 1.0);
    EXPECT_EQ(*effort_metrics(10, 2, EffortTruth{0, 0}).recall, 1.0);
}

TEST(Effort, BoundsViolations) {
    EXPECT_THROW(effort_metrics(10, 11), ValidationError);
    EXPECT_THROW(effort_metrics(10, 2, EffortTruth{11, 0}), ValidationError);
    EXPECT_THROW(effort_metrics(10, 2, EffortTruth{5, 3}), ValidationError);
    EXPECT_THROW(effort_metrics(10, 4, EffortTruth{2, 3}), ValidationError);
    EXPECT_THROW(effort_metrics(10, 4, {}, -1.0), ValidationError);
}

TEST(Effort, ReductionPlusReportedShareIsOne) {
    for (std::size_t t = 1; t <= 400; ++t) {
        for (std::size_t r = 0; r <= t; ++r) {
            const auto m = effort_metrics(t, r);
            ASSERT_EQ(m.effort_reduction + static_cast<double>(r) / static_cast<double>(t), 1.0) << r << "/" << t;
            ASSERT_GE(m.effort_reduction, 0.0);
            ASSERT_LE(m.effort_reduction, 1.0);
        }
    }
}

TEST(Effort, CostMultiplier) {
    const auto m = effort_metrics(150, 15, {}, 2.0);
    EXPECT_DOUBLE_EQ(*m.manual_review_cost, 300.0);
    EXPECT_DOUBLE_EQ(*m.tool_review_cost, 30.0);
    EXPECT_DOUBLE_EQ(*m.review_cost_saved, 270.0);
}

ScanConfig chain5_config() {
    ScanConfig c;
    c.snapshot = fixture("chain5.snapshot.json");
    c.store = fixture("chain5.store");
    c.as_of = make_date(2024, 1, 1);
    return c;
}

TEST(Scan, Chain5DormantLeafTaintsEverything) {
    const auto report = run_scan(chain5_config());
    ASSERT_EQ(report.entries.size(), 5u);
    EXPECT_EQ(report.summary.suspicious, 5u);
    EXPECT_EQ(exit_code(report), 1);
    const auto* e = report.find(LibraryId::parse("npm:e@1.0.0"));
    ASSERT_NE(e, nullptr);
    EXPECT_EQ(e->label, MaintenanceLabel::Dormant);
    EXPECT_TRUE(e->culprits.empty());
    std::size_t via_culprits = 0;
    for (const auto& entry : report.entries) {
        EXPECT_EQ(entry.verdict, Verdict::Suspicious);
        if (entry.id == e->id) continue;
        EXPECT_EQ(entry.label, MaintenanceLabel::Active) << entry.id;
        ASSERT_EQ(entry.culprits.size(), 1u);
        EXPECT_EQ(entry.culprits[0].id, e->id);
        ++via_culprits;
    }
    EXPECT_EQ(via_culprits, 4u);
    // Default context is security relevant without alternatives.
    for (const auto& entry : report.entries) EXPECT_EQ(entry.action, Action::ContinueDevelopment);
}

TEST(Scan, RiskFlowsTowardDependents) {
    const auto report = run_scan(chain5_config());
    // Reversed edges carry e's mass up the chain: e > d > c > b > a.
    std::vector<double> risk;
    for (const auto& name : {"e", "d", "c", "b", "a"}) {
        risk.push_back(report.find(LibraryId::parse(std::string("npm:") + name + "@1.0.0"))->risk_score);
    }
    for (std::size_t i = 1; i < risk.size(); ++i) EXPECT_GT(risk[i - 1], risk[i]);
}

TEST(Scan, ForecastsPerHorizon) {
    auto c = chain5_config();
    c.horizons = {Horizon::of(1), Horizon::of(12)};
    const auto report = run_scan(c);
    EXPECT_EQ(report.horizons, (std::vector<int>{1, 12}));
    for (const auto& e : report.entries) {
        ASSERT_EQ(e.forecasts.size(), 2u) << e.id;
        EXPECT_EQ(e.forecasts[0].months, 1);
        EXPECT_EQ(e.forecasts[0].as_of, make_date(2024, 1, 31));
        EXPECT_EQ(e.forecasts[1].months, 12);
    }
    // A leaf that stopped committing stays off the Active label in the future.
    EXPECT_NE(report.find(LibraryId::parse("npm:e@1.0.0"))->forecasts[1].label, MaintenanceLabel::Active);
}

TEST(Scan, PerLibraryContextDrivesActions) {
    auto c = chain5_config();
    c.contexts["npm:a"] = {.security_relevant = false, .alternatives_exist = false};
    c.contexts["npm:b@1.0.0"] = {.security_relevant = true, .alternatives_exist = true};
    const auto report = run_scan(c);
    EXPECT_EQ(report.find(LibraryId::parse("npm:a@1.0.0"))->action, Action::IgnoreWarnings);
    EXPECT_EQ(report.find(LibraryId::parse("npm:b@1.0.0"))->action, Action::Replacement);
    EXPECT_EQ(report.find(LibraryId::parse("npm:c@1.0.0"))->action, Action::ContinueDevelopment);
    c.prefer_continue_over_replace = true;
    EXPECT_EQ(run_scan(c).find(LibraryId::parse("npm:b@1.0.0"))->action, Action::ContinueDevelopment);
}

SynthConfig all_active_synth() {
    SynthConfig s;
    s.seed = 3;
    s.n_libraries = 12;
    s.label_mix = {1.0, 0.0, 0.0, 0.0};
    s.edge_density = 0.3;
    return s;
}

ScanConfig config_for(const std::filesystem::path& dir, Date as_of) {
    ScanConfig c;
    c.snapshot = dir / "snapshot.json";
    c.store = dir / "store";
    c.as_of = as_of;
    return c;
}

TEST(Scan, AllActiveEcosystemIsClean) {
    TempDir tmp;
    const auto s = all_active_synth();
    write_synthetic_ecosystem(generate_synthetic_ecosystem(s), s, tmp.path());
    const auto report = run_scan(config_for(tmp.path(), s.as_of));
    EXPECT_EQ(report.entries.size(), 12u);
    EXPECT_EQ(report.summary.suspicious, 0u);
    EXPECT_EQ(exit_code(report), 0);
    for (const auto& e : report.entries) {
        EXPECT_EQ(e.label, MaintenanceLabel::Active);
        EXPECT_FALSE(e.action);
    }
    EXPECT_EQ(report.summary.effort.effort_reduction, 1.0);
}

TEST(Scan, MissingRepositoryIsInactiveWithWarning) {
    TempDir tmp;
    auto snap = parse_snapshot(read_file(fixture("chain5.snapshot.json")));
    snap.libraries[4].repo.reset();                                        // e: no repo at all
    snap.libraries[3].repo = RepoRef{"forge.example", "chain", "missing"}; // d: not in the store
    write_file(tmp.path() / "snapshot.json", serialize_snapshot(snap));
    auto c = chain5_config();
    c.snapshot = tmp.path() / "snapshot.json";
    const auto report = run_scan(c);
    for (const auto& name : {"npm:d@1.0.0", "npm:e@1.0.0"}) {
        const auto* e = report.find(LibraryId::parse(name));
        EXPECT_FALSE(e->data_available);
        EXPECT_EQ(e->label, MaintenanceLabel::Inactive);
        EXPECT_TRUE(e->forecasts.empty());
        const bool warned = std::any_of(report.warnings.begin(), report.warnings.end(), [&](const std::string& w) {
            return w.rfind(std::string(name) + ": no data", 0) == 0;
        });
        EXPECT_TRUE(warned) << name;
    }
    EXPECT_EQ(exit_code(report), 1);
}

TEST(Scan, EmptyRootsGiveEmptyReport) {
    TempDir tmp;
    auto snap = parse_snapshot(read_file(fixture("chain5.snapshot.json")));
    snap.roots.clear();
    write_file(tmp.path() / "snapshot.json", serialize_snapshot(snap));
    auto c = chain5_config();
    c.snapshot = tmp.path() / "snapshot.json";
    const auto report = run_scan(c);
    EXPECT_TRUE(report.entries.empty());
    EXPECT_EQ(exit_code(report), 0);
    const auto doc = nlohmann::json::parse(render_report(report, ReportFormat::Json));
    EXPECT_TRUE(doc.at("entries").is_array());
    EXPECT_TRUE(doc.at("entries").empty());
    EXPECT_EQ(doc.at("summary").at("total"), 0);
}

TEST(Scan, ConfigValidation) {
    auto c = chain5_config();
    c.api = "http://localhost:1";
    EXPECT_THROW(run_scan(c), ValidationError);
    c = chain5_config();
    c.store.reset();
    EXPECT_THROW(run_scan(c), ValidationError);
    c = chain5_config();
    c.horizons = {Horizon{2}};
    EXPECT_THROW(run_scan(c), ValidationError);
    c = chain5_config();
    c.model = "m.json";
    c.rules_only = true;
    EXPECT_THROW(run_scan(c), ValidationError);
    c = chain5_config();
    c.snapshot = fixture("does-not-exist.json");
    EXPECT_THROW(run_scan(c), NotFoundError);
}

TEST(Scan, SummaryMatchesEntries) {
    TempDir tmp;
    SynthConfig s;
    s.seed = 21;
    s.n_libraries = 30;
    s.edge_density = 0.15;
    write_synthetic_ecosystem(generate_synthetic_ecosystem(s), s, tmp.path());
    const auto report = run_scan(config_for(tmp.path(), s.as_of));
    std::array<std::size_t, kLabelCount> counts{};
    std::size_t suspicious = 0;
    for (const auto& e : report.entries) {
        ++counts[label_index(e.label)];
        suspicious += e.verdict == Verdict::Suspicious;
        EXPECT_EQ(e.action.has_value(), e.verdict == Verdict::Suspicious);
    }
    EXPECT_EQ(report.summary.total, report.entries.size());
    EXPECT_EQ(report.summary.label_counts, counts);
    EXPECT_EQ(report.summary.suspicious, suspicious);
    EXPECT_TRUE(std::is_sorted(report.entries.begin(), report.entries.end(),
                               [](const ReportEntry& a, const ReportEntry& b) { return a.id < b.id; }));
}

TEST(ScanSingle, ActiveLeaf) {
    TempDir tmp;
    const auto s = all_active_synth();
    const auto eco = generate_synthetic_ecosystem(s);
    write_synthetic_ecosystem(eco, s, tmp.path());
    const auto leaf = std::find_if(eco.snapshot.libraries.begin(), eco.snapshot.libraries.end(),
                                   [](const LibraryRecord& r) { return r.deps.empty(); });
    ASSERT_NE(leaf, eco.snapshot.libraries.end());
    const auto report = scan_single(leaf->id.str(), config_for(tmp.path(), s.as_of));
    ASSERT_EQ(report.entries.size(), 1u);
    EXPECT_EQ(report.entries[0].verdict, Verdict::Unsuspicious);
    EXPECT_TRUE(report.entries[0].root);
}

TEST(ScanSingle, DormantTransitiveDependency) {
    const auto report = scan_single("npm:c", chain5_config());
    ASSERT_EQ(report.entries.size(), 3u);
    const auto* c = report.find(LibraryId::parse("npm:c@1.0.0"));
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->label, MaintenanceLabel::Active);
    EXPECT_EQ(c->verdict, Verdict::Suspicious);
    ASSERT_EQ(c->culprits.size(), 1u);
    EXPECT_EQ(c->culprits[0].id, LibraryId::parse("npm:e@1.0.0"));
    EXPECT_FALSE(report.find(LibraryId::parse("npm:a@1.0.0")));
}

TEST(ScanSingle, UnknownIdInFileIsNamed) {
    TempDir tmp;
    write_file(tmp.path() / "ids.txt", "# libraries\nnpm:a@1.0.0\n\nnpm:nope@2.0.0\nnpm:e\n");
    const auto ids = parse_id_list(read_file(tmp.path() / "ids.txt"));
    ASSERT_EQ(ids.size(), 3u);
    try {
        scan_single(ids, chain5_config());
        FAIL() << "expected NotFoundError";
    } catch (const NotFoundError& e) {
        EXPECT_NE(std::string(e.what()).find("npm:nope@2.0.0"), std::string::npos) << e.what();
        EXPECT_EQ(std::string(e.what()).find("npm:a@1.0.0"), std::string::npos) << e.what();
    }
    EXPECT_THROW(scan_single("npm:a@9.9.9", chain5_config()), NotFoundError);
}

TEST(Render, DeterministicAndParsable) {
    const auto report = run_scan(chain5_config());
    for (auto f : {ReportFormat::Json, ReportFormat::Text, ReportFormat::Markdown}) {
        EXPECT_EQ(render_report(report, f), render_report(run_scan(chain5_config()), f));
    }
    const auto json = render_report(report, ReportFormat::Json);
    const auto doc = nlohmann::json::parse(json);
    EXPECT_EQ(doc.at("tool").at("version"), std::string(kToolVersion));
    EXPECT_EQ(doc.at("entries").size(), 5u);
    EXPECT_EQ(doc.at("summary").at("suspicious"), 5);
    EXPECT_EQ(json.back(), '\n');
    EXPECT_NE(json.find("\"effort_reduction\": 0.000000"), std::string::npos);
}

TEST(Render, TablesSortedByRisk) {
    const auto report = run_scan(chain5_config());
    for (auto f : {ReportFormat::Text, ReportFormat::Markdown}) {
        const auto out = render_report(report, f);
        std::vector<std::size_t> pos;
        for (const auto& name : {"npm:e@1.0.0", "npm:d@1.0.0", "npm:c@1.0.0", "npm:b@1.0.0", "npm:a@1.0.0"}) {
            // First mention in the table, not in a culprit list.
            const auto row = out.find(f == ReportFormat::Markdown ? "`" + std::string(name) + "`" : std::string(name) + "\n");
            ASSERT_NE(row, std::string::npos) << name;
            pos.push_back(row);
        }
        EXPECT_TRUE(std::is_sorted(pos.begin(), pos.end()));
    }
}

TEST(Config, ParsesAndResolvesRelativePaths) {
    const auto c = parse_scan_config(R"({
        "snapshot": "snap.json", "store": "/abs/store", "as_of": "2024-01-01", "horizons": [3, 12],
        "propagation": {"damping": 0.9, "direction": "as_is"},
        "thresholds": {"active_days": 60},
        "feature_complete_is_negative": false,
        "forecast": {"method": "holt", "fit_window": 20},
        "defaults": {"alternatives_exist": true},
        "libraries": {"npm:left-pad": {"security_relevant": false}},
        "prefer_continue_over_replace": true,
        "cost_per_review_hours": 1.5,
        "format": "markdown"
    })",
                                     "/cfg");
    EXPECT_EQ(c.snapshot, std::filesystem::path("/cfg/snap.json"));
    EXPECT_EQ(c.store, std::filesystem::path("/abs/store"));
    EXPECT_EQ(c.as_of, make_date(2024, 1, 1));
    ASSERT_EQ(c.horizons.size(), 2u);
    EXPECT_EQ(c.horizons[1].months, 12);
    EXPECT_EQ(c.propagation.damping, 0.9);
    EXPECT_EQ(c.propagation.direction, Direction::AsIs);
    EXPECT_EQ(c.thresholds.active_days, 60);
    EXPECT_FALSE(c.verdict.feature_complete_is_negative);
    EXPECT_EQ(c.forecast.method, ForecastMethod::Holt);
    EXPECT_EQ(c.forecast.fit_window, 20u);
    EXPECT_TRUE(c.prefer_continue_over_replace);
    EXPECT_EQ(c.cost_per_review_hours, 1.5);
    EXPECT_EQ(c.format, ReportFormat::Markdown);
    const auto lp = c.context_for(LibraryId::parse("npm:left-pad@1.3.0"));
    EXPECT_FALSE(lp.security_relevant);
    EXPECT_TRUE(lp.alternatives_exist);
    EXPECT_EQ(c.context_for(LibraryId::parse("npm:other@1.0.0")), (LibraryContext{true, true}));
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(parse_scan_config(R"({"snapshot": "s", "stor": "x"})"), ValidationError);
    EXPECT_THROW(parse_scan_config(R"({"horizons": [2]})"), ValidationError);
    EXPECT_THROW(parse_scan_config(R"({"libraries": {"npm:x": {"relevant": true}}})"), ValidationError);
    EXPECT_THROW(parse_scan_config(R"({"propagation": {"direction": "sideways"}})"), ValidationError);
    EXPECT_THROW(parse_scan_config(R"({"format": "html"})"), ValidationError);
    EXPECT_THROW(parse_scan_config("{"), ParseError);
}

TEST(Evaluate, RulesOnGeneratorOutputAreExact) {
    TempDir tmp;
    SynthConfig s;
    s.seed = 5;
    s.n_libraries = 60;
    s.edge_density = 0.08;
    write_synthetic_ecosystem(generate_synthetic_ecosystem(s), s, tmp.path());
    auto c = config_for(tmp.path(), s.as_of);
    c.horizons.clear();
    const auto truth = parse_truth(read_file(tmp.path() / "truth.json"));
    const auto ev = evaluate(c, truth);
    EXPECT_EQ(ev.labels.total(), 60u);
    EXPECT_EQ(ev.labels.accuracy(), 1.0);
    EXPECT_EQ(ev.suspicion.accuracy(), 1.0);
    EXPECT_EQ(ev.maintained.accuracy(), 1.0);
    EXPECT_EQ(*ev.effort.recall, 1.0);
    EXPECT_EQ(*ev.effort.precision, 1.0);
}

/// Independent tally: labels from the report, truth from the truth file, true verdicts from
/// a breadth-first walk over the snapshot's dependency lists.
struct Tally {
    std::array<std::array<std::size_t, 4>, 4> labels{};
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Tally brute_force_tally(const DependencySnapshot& snap, const GroundTruth& truth, const Report& report) {
    std::map<LibraryId, std::vector<LibraryId>> deps;
    for (const auto& lib : snap.libraries) deps[lib.id] = lib.deps;
    Tally t;
    for (const auto& e : report.entries) {
        const auto self = truth.labels.at(e.id);
        t.labels[static_cast<int>(self)][static_cast<int>(e.label)]++;
        bool bad = self != MaintenanceLabel::Active;
        std::set<LibraryId> seen;
        std::vector<LibraryId> todo = deps[e.id];
        while (!todo.empty()) {
            const auto cur = todo.back();
            todo.pop_back();
            if (!seen.insert(cur).second) continue;
            if (truth.labels.at(cur) != MaintenanceLabel::Active) bad = true;
            for (const auto& d : deps[cur]) todo.push_back(d);
        }
        const bool reported = e.verdict == Verdict::Suspicious;
        if (bad && reported) ++t.tp;
        if (!bad && reported) ++t.fp;
        if (bad && !reported) ++t.fn;
        if (!bad && !reported) ++t.tn;
    }
    return t;
}

TEST(Evaluate, BoundaryNoiseMatchesBruteForceTally) {
    TempDir tmp;
    SynthConfig s;
    s.seed = 13;
    s.n_libraries = 80;
    s.edge_density = 0.05;
    s.boundary_noise = 0.1;
    const auto eco = generate_synthetic_ecosystem(s);
    ASSERT_FALSE(eco.noisy.empty());
    write_synthetic_ecosystem(eco, s, tmp.path());
    auto c = config_for(tmp.path(), s.as_of);
    c.horizons.clear();
    const auto truth = parse_truth(read_file(tmp.path() / "truth.json"));
    const auto ev = evaluate(c, truth);
    const auto t = brute_force_tally(eco.snapshot, truth, ev.report);

    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(ev.labels.counts[r][p], t.labels[r][p]) << r << "," << p;
    EXPECT_LT(ev.labels.accuracy(), 1.0);
    EXPECT_EQ(ev.suspicion.counts[1][1], t.tp);
    EXPECT_EQ(ev.suspicion.counts[0][1], t.fp);
    EXPECT_EQ(ev.suspicion.counts[1][0], t.fn);
    EXPECT_EQ(ev.suspicion.counts[0][0], t.tn);
    EXPECT_EQ(ev.effort.truth->true_suspicious, t.tp + t.fn);
    EXPECT_EQ(ev.effort.truth->true_positives, t.tp);
    EXPECT_DOUBLE_EQ(*ev.effort.recall, static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn));
    EXPECT_DOUBLE_EQ(*ev.effort.precision, static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp));
    EXPECT_DOUBLE_EQ(ev.effort.effort_reduction, 1.0 - static_cast<double>(t.tp + t.fp) / 80.0);
}

TEST(Evaluate, TrainedForestOnHeldOutEcosystem) {
    TempDir tmp;
    SynthConfig train_cfg;
    train_cfg.seed = 7;
    train_cfg.n_libraries = 400;
    const auto model = train_classifier(generate_synthetic_ecosystem(train_cfg).dataset(), {.seed = 7});
    write_file(tmp.path() / "model.json", serialize_classifier(model));

    SynthConfig test_cfg;
    test_cfg.seed = 8;
    test_cfg.n_libraries = 120;
    test_cfg.edge_density = 0.03;
    write_synthetic_ecosystem(generate_synthetic_ecosystem(test_cfg), test_cfg, tmp.path() / "eco");
    auto c = config_for(tmp.path() / "eco", test_cfg.as_of);
    c.model = tmp.path() / "model.json";
    c.horizons.clear();
    const auto ev = evaluate(c, parse_truth(read_file(tmp.path() / "eco" / "truth.json")));
    EXPECT_EQ(ev.report.classifier, "random_forest");
    EXPECT_GE(ev.labels.macro_f1(), 0.9);
}

TEST(Evaluate, JsonSections) {
    TempDir tmp;
    SynthConfig s;
    s.n_libraries = 20;
    write_synthetic_ecosystem(generate_synthetic_ecosystem(s), s, tmp.path());
    auto c = config_for(tmp.path(), s.as_of);
    c.horizons.clear();
    const auto ev = evaluate(c, parse_truth(read_file(tmp.path() / "truth.json")));
    const auto full = evaluation_to_json(ev);
    EXPECT_TRUE(full.contains("labels"));
    EXPECT_EQ(full.at("labels").at("matrix").size(), 4u);
    const auto binary = evaluation_to_json(ev, true);
    EXPECT_FALSE(binary.contains("labels"));
    EXPECT_EQ(binary.at("maintained").at("classes")[1], "not_maintained");
}

TEST(Golden, Eco20ReportsMatchCommittedFiles) {
    ScanConfig c;
    c.snapshot = fixture("eco20/snapshot.json");
    c.store = fixture("eco20/store");
    c.as_of = make_date(2024, 1, 1);
    const auto report = run_scan(c);
    EXPECT_EQ(render_report(report, ReportFormat::Json), read_file(fixture("eco20/golden_report.json")));
    EXPECT_EQ(render_report(report, ReportFormat::Markdown), read_file(fixture("eco20/golden_report.md")));
    EXPECT_EQ(exit_code(report), 1);
}

} // namespace
} // namespace depwatch
