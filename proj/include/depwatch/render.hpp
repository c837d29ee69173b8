#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "depwatch/canonical_json.hpp"
#include "depwatch/features.hpp"
#include "depwatch/scan.hpp"

namespace depwatch {

inline nlohmann::json distribution_to_json(const LabelDistribution& d) {
    nlohmann::json j = nlohmann::json::object();
    for (auto l : kAllLabels) j[std::string(label_name(l))] = d[l];
    return j;
}

inline nlohmann::json effort_to_json(const EffortMetrics& m) {
    nlohmann::json j = {{"total", m.total}, {"reported", m.reported}, {"effort_reduction", m.effort_reduction}};
    if (m.truth) {
        j["true_suspicious"] = m.truth->true_suspicious;
        j["true_positives"] = m.truth->true_positives;
    }
    if (m.recall) j["recall"] = *m.recall;
    if (m.precision) j["precision"] = *m.precision;
    if (m.cost_per_review) {
        j["cost_per_review_hours"] = *m.cost_per_review;
        j["manual_review_hours"] = *m.manual_review_cost;
        j["tool_review_hours"] = *m.tool_review_cost;
        j["review_hours_saved"] = *m.review_cost_saved;
    }
    return j;
}

inline nlohmann::json report_to_json(const Report& report) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        nlohmann::json culprits = nlohmann::json::array();
        for (const auto& c : e.culprits) {
            culprits.push_back({{"id", c.id.str()}, {"label", label_name(c.label)}, {"risk", c.risk}});
        }
        nlohmann::json forecasts = nlohmann::json::array();
        for (const auto& f : e.forecasts) {
            forecasts.push_back({{"horizon_months", f.months},
                                 {"as_of", format_date(f.as_of)},
                                 {"label", label_name(f.label)},
                                 {"distribution", distribution_to_json(f.distribution)}});
        }
        nlohmann::json features = nullptr;
        if (e.features) {
            features = nlohmann::json::object();
            for (std::size_t k = 0; k < kFeatureCount; ++k) features[std::string(kFeatureNames[k])] = e.features->values[k];
        }
        entries.push_back({{"id", e.id.str()},
                           {"repo", e.repo ? nlohmann::json(e.repo->str()) : nlohmann::json(nullptr)},
                           {"root", e.root},
                           {"data_available", e.data_available},
                           {"label", label_name(e.label)},
                           {"distribution", distribution_to_json(e.distribution)},
                           {"features", std::move(features)},
                           {"verdict", verdict_name(e.verdict)},
                           {"culprits", std::move(culprits)},
                           {"risk_score", e.risk_score},
                           {"forecasts", std::move(forecasts)},
                           {"action", e.action ? nlohmann::json(action_name(*e.action)) : nlohmann::json(nullptr)}});
    }
    nlohmann::json counts = nlohmann::json::object();
    for (auto l : kAllLabels) counts[std::string(label_name(l))] = report.summary.label_counts[label_index(l)];
    return {{"tool", {{"name", "depwatch"}, {"version", report.tool_version}}},
            {"as_of", format_date(report.as_of)},
            {"classifier", report.classifier},
            {"horizons", report.horizons},
            {"entries", std::move(entries)},
            {"summary",
             {{"total", report.summary.total},
              {"label_counts", std::move(counts)},
              {"suspicious", report.summary.suspicious},
              {"effort", effort_to_json(report.summary.effort)}}},
            {"warnings", report.warnings},
            {"notes", report.notes}};
}

namespace detail {

/// Highest risk first, then by id.
inline std::vector<const ReportEntry*> by_risk(const Report& report) {
    std::vector<const ReportEntry*> out;
    for (const auto& e : report.entries) out.push_back(&e);
    std::stable_sort(out.begin(), out.end(), [](const ReportEntry* a, const ReportEntry* b) {
        return a->risk_score != b->risk_score ? a->risk_score > b->risk_score : a->id < b->id;
    });
    return out;
}

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

inline std::string forecast_cell(const ReportEntry& e, int months) {
    for (const auto& f : e.forecasts) {
        if (f.months == months) return std::string(label_name(f.label));
    }
    return "-";
}

inline std::string culprit_list(const ReportEntry& e) {
    std::string out;
    for (const auto& c : e.culprits) {
        if (!out.empty()) out += ", ";
        out += c.id.str() + " (" + std::string(label_name(c.label)) + ")";
    }
    return out;
}

inline std::string summary_line(const Report& r) {
    std::string s = std::to_string(r.summary.total) + " libraries, " + std::to_string(r.summary.suspicious) +
                    " suspicious, effort reduction " + format_fixed6(r.summary.effort.effort_reduction);
    return s;
}

inline std::string label_count_line(const Report& r) {
    std::string s;
    for (auto l : kAllLabels) {
        if (!s.empty()) s += ", ";
        s += std::string(label_name(l)) + " " + std::to_string(r.summary.label_counts[label_index(l)]);
    }
    return s;
}

inline std::string render_text(const Report& r) {
    std::string out = "depwatch " + r.tool_version + "  as_of " + format_date(r.as_of) + "  classifier " +
                      r.classifier + "\n" + summary_line(r) + "\n" + label_count_line(r) + "\n\n";
    std::vector<std::string> header = {"risk", "verdict", "label"};
    for (int m : r.horizons) header.push_back(std::to_string(m) + "m");
    header.insert(header.end(), {"action", "id"});
    std::vector<std::vector<std::string>> rows{header};
    for (const auto* e : by_risk(r)) {
        std::vector<std::string> row = {format_fixed6(e->risk_score), std::string(verdict_name(e->verdict)),
                                        std::string(label_name(e->label))};
        for (int m : r.horizons) row.push_back(forecast_cell(*e, m));
        row.push_back(e->action ? std::string(action_name(*e->action)) : "-");
        row.push_back(e->id.str());
        rows.push_back(std::move(row));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    const auto ordered = by_risk(r);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string line;
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
            line += c + 1 == rows[i].size() ? rows[i][c] : pad(rows[i][c], width[c] + 2);
        }
        out += line + "\n";
        if (i > 0 && !ordered[i - 1]->culprits.empty()) out += "    culprits: " + culprit_list(*ordered[i - 1]) + "\n";
    }
    if (!r.warnings.empty()) {
        out += "\nwarnings:\n";
        for (const auto& w : r.warnings) out += "  - " + w + "\n";
    }
    if (!r.notes.empty()) {
        out += "\nnotes:\n";
        for (const auto& n : r.notes) out += "  - " + n + "\n";
    }
    return out;
}

inline std::string md_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '|') out += '\\';
        out += ch;
    }
    return out;
}

inline std::string render_markdown(const Report& r) {
    std::string out = "# depwatch report\n\n";
    out += "- as of: " + format_date(r.as_of) + "\n";
    out += "- tool version: " + r.tool_version + "\n";
    out += "- classifier: " + r.classifier + "\n";
    out += "- " + summary_line(r) + "\n";
    out += "- labels: " + label_count_line(r) + "\n\n";
    out += "| risk | verdict | label |";
    for (int m : r.horizons) out += " " + std::to_string(m) + "m |";
    out += " action | library | culprits |\n|---:|---|---|";
    for (std::size_t k = 0; k < r.horizons.size(); ++k) out += "---|";
    out += "---|---|---|\n";
    for (const auto* e : by_risk(r)) {
        out += "| " + format_fixed6(e->risk_score) + " | " + std::string(verdict_name(e->verdict)) + " | " +
               std::string(label_name(e->label)) + " |";
        for (int m : r.horizons) out += " " + forecast_cell(*e, m) + " |";
        out += " " + (e->action ? std::string(action_name(*e->action)) : std::string("-")) + " | `" +
               md_escape(e->id.str()) + "` | " + (e->culprits.empty() ? "-" : md_escape(culprit_list(*e))) + " |\n";
    }
    if (!r.warnings.empty()) {
        out += "\n## Warnings\n\n";
        for (const auto& w : r.warnings) out += "- " + md_escape(w) + "\n";
    }
    if (!r.notes.empty()) {
        out += "\n## Notes\n\n";
        for (const auto& n : r.notes) out += "- " + md_escape(n) + "\n";
    }
    return out;
}

} // namespace detail

inline std::string render_report(const Report& report, ReportFormat format) {
    switch (format) {
    case ReportFormat::Json: return canonical_dump(report_to_json(report));
    case ReportFormat::Text: return detail::render_text(report);
    case ReportFormat::Markdown: return detail::render_markdown(report);
    }
    return canonical_dump(report_to_json(report));
}

} // namespace depwatch
