#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <dancestyle/dancestyle.hpp>

namespace fs = std::filesystem;
using namespace dancestyle;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEvaluation = 3;

struct ConfigFlags {
    std::string config_path;
    std::size_t segments = 0;
    int dims = 0;
    std::string role_map;
    bool no_fft = false;
    bool raw_keypoints = false;
    std::string level;
    std::string model;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::string eval_mode;
    std::vector<std::string> params;
};

// Flags override the config file, which overrides the built-in defaults.
RunConfig resolve_config(const CLI::App& cmd, const ConfigFlags& f) {
    RunConfig c = f.config_path.empty() ? RunConfig{} : load_run_config(f.config_path);
    auto given = [&](const char* name) { return cmd.get_option_no_throw(name) && cmd.count(name) > 0; };
    if (given("--segments")) c.segments = f.segments;
    if (given("--dims")) c.dims = f.dims;
    if (given("--role-map")) c.role_map = f.role_map;
    if (given("--no-fft")) c.include_fft = !f.no_fft;
    if (given("--raw-keypoints")) c.raw_keypoints = f.raw_keypoints;
    if (given("--level")) c.level = f.level;
    if (given("--model")) {
        // overrides from the file belong to the file's model
        if (f.model != c.model) c.hyperparameters = nlohmann::json::object();
        c.model = f.model;
    }
    if (given("--folds")) c.folds = f.folds;
    if (given("--seed")) c.seed = f.seed;
    if (given("--eval")) c.eval_mode = f.eval_mode;
    for (const auto& kv : f.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
        if (parsed.is_discarded()) throw CLI::ValidationError("--param", "value of '" + key + "' is not a number or boolean");
        c.hyperparameters[key] = parsed;
    }
    c.validate();
    c.model_spec();  // rejects unknown hyperparameters before any work
    return c;
}

JointRoleMap role_map_for(const RunConfig& c) { return c.role_map.empty() ? coco_role_map() : load_role_map(c.role_map); }

int cmd_extract(const CLI::App& cmd, const ConfigFlags& flags, const std::string& manifest_path, const std::string& out) {
    const RunConfig config = resolve_config(cmd, flags);
    const auto manifest = filter_level(load_manifest(manifest_path), config.level);
    if (manifest.entries.empty()) throw DataError(manifest_path + ": no entries" + (config.level.empty() ? "" : " at level " + config.level));
    std::vector<ExtractionFailure> failures;
    const FeatureTable table = extract_features(manifest, role_map_for(config), config, failures);
    if (!table.rows.empty()) write_feature_table(table, out);
    std::cout << "extracted " << table.rows.size() << " rows x " << table.feature_names.size() << " features from "
              << manifest.entries.size() - failures.size() << "/" << manifest.entries.size() << " files -> " << out << "\n";
    if (!failures.empty()) {
        std::cerr << failures.size() << " file(s) failed:\n";
        for (const auto& f : failures) std::cerr << "  " << f.path << ": " << f.message << "\n";
        return kExitData;
    }
    return 0;
}

void write_artifacts(const EvaluationReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_text_file(dir / "confusion.svg", confusion_svg(report.confusion));
    write_text_file(dir / "importances.csv", importances_csv(report));
}

int cmd_crossval(const CLI::App& cmd, const ConfigFlags& flags, const std::string& features, const std::string& out_dir) {
    const RunConfig config = resolve_config(cmd, flags);
    const FeatureTable table = load_feature_table(features);
    const EvaluationReport report = run_crossval(table, config);
    write_artifacts(report, out_dir);
    std::cout << accuracy_line(report) << "\n";
    return 0;
}

int cmd_report(const std::string& report_path, const std::string& svg, const std::string& importances, std::size_t top) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(report_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(report_path + ": invalid JSON: " + e.what());
    }
    EvaluationReport report;
    try {
        report = report_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(report_path + ": not a report: " + e.what());
    }
    std::cout << accuracy_line(report) << "\n";
    std::cout << "folds:";
    for (double a : report.per_fold_accuracy) std::printf(" %.2f", a);
    std::cout << "\n\nconfusion (rows = true, %):\n";
    const auto pct = report.confusion.row_percentages();
    std::size_t width = 6;
    for (const auto& name : report.confusion.class_names) width = std::max(width, name.size() + 1);
    for (std::size_t i = 0; i < pct.size(); ++i) {
        std::printf("%-*s", static_cast<int>(width), report.confusion.class_names[i].c_str());
        for (double v : pct[i]) std::printf(" %6.1f", v);
        std::printf("\n");
    }
    if (!report.importances.empty() && top > 0) {
        std::cout << "\ntop features:\n";
        for (std::size_t i = 0; i < std::min(top, report.importances.size()); ++i)
            std::printf("  %8.5f  %s\n", report.importances[i].second, report.importances[i].first.c_str());
    }
    if (!svg.empty()) write_text_file(svg, confusion_svg(report.confusion));
    if (!importances.empty()) write_text_file(importances, importances_csv(report));
    return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& out) {
    const auto manifest = write_dataset(generate(spec), out);
    std::cout << "wrote " << spec.n_classes * spec.videos_per_class << " videos -> " << manifest.string() << "\n";
    return 0;
}

int cmd_convert_bvh(const std::string& in, const std::string& out, const std::string& role_map_path,
                    const std::vector<std::string>& extra_joints) {
    if (!fs::is_directory(in)) throw DataError(in + ": not a directory");
    const JointRoleMap roles = load_role_map(role_map_path);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(in)) {
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        if (entry.is_regular_file() && ext == ".bvh") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) std::cerr << "warning: no .bvh files in " << in << "\n";

    fs::create_directories(out);
    DatasetManifest manifest;
    std::vector<ExtractionFailure> failures;
    for (const auto& file : files) {
        const std::string id = file.stem().string();
        try {
            const MotionSequence seq = parse_bvh(read_text_file(file), roles, extra_joints, id);
            const fs::path target = fs::path(out) / (id + ".json");
            write_sequence(seq, target);
            ManifestEntry entry;
            entry.path = target;
            entry.group_id = id;
            entry.video_id = id;
            manifest.entries.push_back(std::move(entry));
        } catch (const DataError& e) {
            failures.push_back({file.string(), e.what()});
        }
    }
    write_manifest(manifest, fs::path(out) / "manifest.csv");
    std::cout << "converted " << manifest.entries.size() << "/" << files.size() << " files -> " << out
              << " (fill in the label column of manifest.csv)\n";
    if (!failures.empty()) {
        std::cerr << failures.size() << " file(s) failed:\n";
        for (const auto& f : failures) std::cerr << "  " << f.path << ": " << f.message << "\n";
        return kExitData;
    }
    return 0;
}

void add_extraction_flags(CLI::App& cmd, ConfigFlags& f) {
    cmd.add_option("--segments", f.segments, "segments per video (N_s)")->check(CLI::PositiveNumber);
    cmd.add_option("--dims", f.dims, "2 or 3")->check(CLI::IsMember({2, 3}));
    cmd.add_option("--role-map", f.role_map, "joint role map JSON (default: COCO)");
    cmd.add_flag("--no-fft", f.no_fft, "drop the spectral channels");
    cmd.add_flag("--raw-keypoints", f.raw_keypoints, "emit flattened per-frame coordinates instead of features");
    cmd.add_option("--level", f.level, "keep only manifest rows at this level")->check(CLI::IsMember({"basic", "advanced"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dance style classification from skeleton motion"};
    app.require_subcommand(1);

    ConfigFlags flags;
    std::string manifest_path, out, features, out_dir, report_path, svg, importances, in_dir, role_map;
    std::size_t top = 20;
    std::vector<std::string> joints;

    auto* extract = app.add_subcommand("extract", "manifest -> per-segment feature CSV");
    extract->add_option("--manifest", manifest_path, "manifest CSV")->required();
    extract->add_option("--out", out, "feature CSV to write")->required();
    extract->add_option("--config", flags.config_path, "JSON run config");
    add_extraction_flags(*extract, flags);

    auto* crossval = app.add_subcommand("crossval", "grouped k-fold evaluation of a feature CSV");
    crossval->add_option("--features", features, "feature CSV")->required();
    crossval->add_option("--out-dir", out_dir, "directory for report.json, confusion.svg, importances.csv")->required();
    crossval->add_option("--config", flags.config_path, "JSON run config");
    crossval->add_option("--model", flags.model, "lr, rf, gb or mlp")
        ->check(CLI::IsMember({"lr", "rf", "gb", "mlp", "logreg_l1", "random_forest", "gradient_boosting", "nn"}));
    crossval->add_option("--folds", flags.folds, "k")->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
    crossval->add_option("--seed", flags.seed);
    crossval->add_option("--eval", flags.eval_mode, "mv (majority vote) or ti (segment concatenation)")
        ->check(CLI::IsMember({"mv", "ti"}));
    crossval->add_option("--param", flags.params, "hyperparameter override, key=value (repeatable)");

    auto* report = app.add_subcommand("report", "summarize a report.json");
    report->add_option("--report", report_path, "report.json")->required()->check(CLI::ExistingFile);
    report->add_option("--svg", svg, "write the confusion heatmap here");
    report->add_option("--importances", importances, "write feature importances here");
    report->add_option("--top", top, "number of features to print")->capture_default_str();

    SynthSpec spec;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dance dataset");
    synth->add_option("--out", out, "output directory")->required();
    synth->add_option("--classes", spec.n_classes)->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--videos", spec.videos_per_class, "videos per class")->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--frames", spec.frames)->capture_default_str()->check(CLI::Range(3, 10000000));
    synth->add_option("--fps", spec.fps)->capture_default_str()->check(CLI::PositiveNumber);
    synth->add_option("--dims", spec.dims)->capture_default_str()->check(CLI::IsMember({2, 3}));
    synth->add_option("--noise", spec.noise_std, "Gaussian noise std, metres")->capture_default_str()->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", spec.seed)->capture_default_str();
    synth->add_option("--frequencies", spec.frequencies, "one frequency per class, Hz")->delimiter(',');

    auto* convert = app.add_subcommand("convert-bvh", "BVH directory -> canonical JSON + manifest stub");
    convert->add_option("--in", in_dir, "directory of .bvh files")->required();
    convert->add_option("--out", out, "output directory")->required();
    convert->add_option("--role-map", role_map, "role map naming the BVH joints")->required()->check(CLI::ExistingFile);
    convert->add_option("--joints", joints, "extra joints to keep (comma separated)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*extract) return cmd_extract(*extract, flags, manifest_path, out);
        if (*crossval) return cmd_crossval(*crossval, flags, features, out_dir);
        if (*report) return cmd_report(report_path, svg, importances, top);
        if (*synth) return cmd_synth(spec, out);
        if (*convert) return cmd_convert_bvh(in_dir, out, role_map, joints);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const EvaluationError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return kExitEvaluation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
