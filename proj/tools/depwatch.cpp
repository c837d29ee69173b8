// depwatch command-line front end. Exit codes: 0 clean, 1 suspicious libraries found,
// 2 operational error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "depwatch/canonical_json.hpp"
#include "depwatch/dataset.hpp"
#include "depwatch/evaluate.hpp"
#include "depwatch/forest.hpp"
#include "depwatch/render.hpp"
#include "depwatch/scan.hpp"
#include "depwatch/synth.hpp"

namespace fs = std::filesystem;
using namespace depwatch;

namespace {

constexpr int kExitError = 2;

struct ScanFlags {
    std::string config;
    std::string snapshot;
    std::string store;
    std::string api;
    std::string as_of;
    std::string model;
    bool rules_only = false;
    std::string horizons;
    std::string format;
    std::string out;
    std::optional<double> cost_per_review_hours;
    bool prefer_continue = false;
    std::optional<bool> security_relevant;
    std::optional<bool> alternatives_exist;
};

void add_scan_flags(CLI::App* cmd, ScanFlags& f, bool with_format = true) {
    cmd->add_option("--config", f.config, "JSON config file; flags override its values");
    cmd->add_option("--snapshot", f.snapshot, "Dependency snapshot (JSON)");
    auto* store = cmd->add_option("--store", f.store, "Offline activity store directory");
    auto* api = cmd->add_option("--api", f.api, "Forge API base URL (token from DEPWATCH_TOKEN)");
    store->excludes(api);
    cmd->add_option("--as-of", f.as_of, "Evaluation date YYYY-MM-DD (default: today, UTC)");
    auto* model = cmd->add_option("--model", f.model, "Trained classifier model");
    auto* rules = cmd->add_flag("--rules-only", f.rules_only, "Label with the rule table instead of a model");
    model->excludes(rules);
    cmd->add_option("--horizons", f.horizons, "Comma-separated forecast horizons in months (1,3,6,9,12); 'none' to skip");
    if (with_format) cmd->add_option("--format", f.format, "json, text or markdown")->check(CLI::IsMember({"json", "text", "markdown", "md"}));
    cmd->add_option("--out", f.out, "Write the output here instead of stdout");
    cmd->add_option("--cost-per-review-hours", f.cost_per_review_hours, "Manual review hours per library");
    cmd->add_flag("--prefer-continue", f.prefer_continue, "Recommend continued development even when alternatives exist");
    cmd->add_option("--security-relevant", f.security_relevant, "Default for libraries without their own context (true/false)");
    cmd->add_option("--alternatives-exist", f.alternatives_exist, "Default for libraries without their own context (true/false)");
}

std::vector<Horizon> parse_horizons(const std::string& text) {
    std::vector<Horizon> out;
    if (text == "none") return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        int months = 0;
        try {
            months = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ValidationError("horizon '" + item + "' is not a number");
        out.push_back(Horizon::of(months));
    }
    return out;
}

ScanConfig build_config(const ScanFlags& f) {
    ScanConfig c;
    if (!f.config.empty()) {
        const fs::path path = f.config;
        c = parse_scan_config(read_file(path), fs::absolute(path).parent_path());
    }
    if (!f.snapshot.empty()) c.snapshot = f.snapshot;
    if (!f.store.empty()) {
        c.store = f.store;
        c.api.reset();
    }
    if (!f.api.empty()) {
        c.api = f.api;
        c.store.reset();
    }
    if (!f.as_of.empty()) c.as_of = parse_date(f.as_of);
    if (!f.model.empty()) {
        c.model = f.model;
        c.rules_only = false;
    }
    if (f.rules_only) {
        c.rules_only = true;
        c.model.reset();
    }
    if (!f.horizons.empty()) c.horizons = parse_horizons(f.horizons);
    if (!f.format.empty()) c.format = parse_format(f.format);
    if (f.cost_per_review_hours) c.cost_per_review_hours = f.cost_per_review_hours;
    if (f.prefer_continue) c.prefer_continue_over_replace = true;
    if (f.security_relevant) c.default_context.security_relevant = *f.security_relevant;
    if (f.alternatives_exist) c.default_context.alternatives_exist = *f.alternatives_exist;
    return c;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "parse_error";
    if (dynamic_cast<const ValidationError*>(&e)) return "validation_error";
    if (dynamic_cast<const VersionError*>(&e)) return "version_error";
    if (dynamic_cast<const NotFoundError*>(&e)) return "not_found";
    if (dynamic_cast<const LookupError*>(&e)) return "lookup_error";
    if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
    if (dynamic_cast<const TrainingError*>(&e)) return "training_error";
    if (dynamic_cast<const FitError*>(&e)) return "fit_error";
    if (dynamic_cast<const RateLimitedError*>(&e)) return "rate_limited";
    if (dynamic_cast<const TransportError*>(&e)) return "transport_error";
    if (dynamic_cast<const Error*>(&e)) return "error";
    return "internal_error";
}

int report_error(const std::exception& e) {
    const nlohmann::json doc = {{"error", {{"kind", error_kind(e)}, {"message", e.what()}}}};
    std::cerr << canonical_dump(doc);
    return kExitError;
}

template <std::size_t K>
std::array<double, K> parse_mix(const std::string& text, const char* what) {
    std::array<double, K> mix{};
    std::stringstream ss(text);
    std::string item;
    std::size_t k = 0;
    while (std::getline(ss, item, ',')) {
        if (k == K) throw ValidationError(std::string(what) + " mix needs exactly " + std::to_string(K) + " shares");
        try {
            mix[k++] = std::stod(item);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + " mix share '" + item + "' is not a number");
        }
    }
    if (k != K) throw ValidationError(std::string(what) + " mix needs exactly " + std::to_string(K) + " shares");
    return mix;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dependency maintenance-activity scanner"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    ScanFlags scan_flags;
    auto* scan_cmd = app.add_subcommand("scan", "Scan a dependency snapshot");
    add_scan_flags(scan_cmd, scan_flags);

    ScanFlags lib_flags;
    std::vector<std::string> lib_ids;
    std::string ids_file;
    auto* lib_cmd = app.add_subcommand("lib", "Scan selected libraries and their dependencies");
    lib_cmd->add_option("ids", lib_ids, "Library ids (ecosystem:name[@version])");
    lib_cmd->add_option("--file", ids_file, "File with one library id per line");
    add_scan_flags(lib_cmd, lib_flags);

    std::string dataset_path, model_out;
    std::uint64_t train_seed = 42;
    ForestParams forest;
    auto* train_cmd = app.add_subcommand("train", "Train the random forest classifier");
    train_cmd->add_option("--dataset", dataset_path, "Labeled dataset (JSON)")->required();
    train_cmd->add_option("--seed", train_seed, "Random seed");
    train_cmd->add_option("--out", model_out, "Model output file")->required();
    train_cmd->add_option("--trees", forest.n_trees, "Number of trees");
    train_cmd->add_option("--max-depth", forest.max_depth, "Maximum tree depth (0 = unlimited)");
    train_cmd->add_option("--min-samples-leaf", forest.min_samples_leaf, "Minimum rows per leaf");
    train_cmd->add_option("--threads", forest.threads, "Worker threads (0 = all cores)");

    SynthConfig synth;
    std::string synth_out, synth_as_of, label_mix, popularity_mix;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic ecosystem with known labels");
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--n", synth.n_libraries, "Number of libraries");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--edge-density", synth.edge_density, "Probability of each forward dependency edge");
    synth_cmd->add_option("--boundary-noise", synth.boundary_noise, "Share of libraries drawn across a rule boundary");
    synth_cmd->add_option("--label-mix", label_mix, "active,feature_complete,dormant,inactive shares");
    synth_cmd->add_option("--popularity-mix", popularity_mix, "low,medium,high shares");
    synth_cmd->add_option("--as-of", synth_as_of, "Date the histories end at");
    synth_cmd->add_option("--ecosystem", synth.ecosystem, "Ecosystem tag of generated ids");

    ScanFlags eval_flags;
    std::string truth_dir;
    bool binary = false;
    auto* eval_cmd = app.add_subcommand("eval", "Score a scan against generated ground truth");
    eval_cmd->add_option("--truth", truth_dir, "Directory written by 'synth'")->required();
    eval_cmd->add_flag("--binary", binary, "Only report maintained-vs-not and suspicious-vs-not metrics");
    add_scan_flags(eval_cmd, eval_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*scan_cmd || *lib_cmd) {
            const bool is_lib = lib_cmd->parsed();
            const auto config = build_config(is_lib ? lib_flags : scan_flags);
            Report report;
            if (is_lib) {
                auto ids = lib_ids;
                if (!ids_file.empty()) {
                    const auto more = parse_id_list(read_file(ids_file));
                    ids.insert(ids.end(), more.begin(), more.end());
                }
                report = scan_single(ids, config);
            } else {
                report = run_scan(config);
            }
            emit((is_lib ? lib_flags : scan_flags).out, render_report(report, config.format));
            return exit_code(report);
        }
        if (*train_cmd) {
            forest.seed = train_seed;
            const auto model = train_classifier(parse_dataset(read_file(dataset_path)), forest);
            write_file(model_out, serialize_classifier(model));
            if (model.oob) {
                std::cerr << "out-of-bag macro-F1 " << detail::format_fixed6(model.oob->confusion.macro_f1()) << " over "
                          << model.oob->rows_scored << " rows\n";
            }
            return 0;
        }
        if (*synth_cmd) {
            if (!label_mix.empty()) synth.label_mix = parse_mix<kLabelCount>(label_mix, "label");
            if (!popularity_mix.empty()) synth.popularity_mix = parse_mix<3>(popularity_mix, "popularity");
            if (!synth_as_of.empty()) synth.as_of = parse_date(synth_as_of);
            write_synthetic_ecosystem(generate_synthetic_ecosystem(synth), synth, synth_out);
            return 0;
        }
        if (*eval_cmd) {
            const fs::path dir = truth_dir;
            const auto truth = parse_truth(read_file(dir / "truth.json"));
            ScanFlags flags = eval_flags;
            if (flags.snapshot.empty() && flags.config.empty()) flags.snapshot = (dir / "snapshot.json").string();
            if (flags.store.empty() && flags.api.empty() && flags.config.empty()) flags.store = (dir / "store").string();
            const auto ev = evaluate(build_config(flags), truth);
            emit(flags.out, canonical_dump(evaluation_to_json(ev, binary)));
            return 0;
        }
    } catch (const std::exception& e) {
        return report_error(e);
    }
    return kExitError;
}
