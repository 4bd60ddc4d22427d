#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ragmia/runner.hpp"

namespace {

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ragmia::IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ragmia::ValidationError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

ragmia::ExperimentConfig load_config(const std::string& path,
                                     const std::optional<std::uint64_t>& seed_override,
                                     const std::optional<std::string>& out_override) {
    auto cfg = ragmia::parse_config(load_json_file(path));
    if (seed_override) cfg.seed = *seed_override;
    if (out_override) cfg.out_dir = *out_override;
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ragmia::IoError("cannot write " + path.string());
    out << content;
}

int cmd_split(const ragmia::ExperimentConfig& cfg, const std::string& out_path) {
    auto records = ragmia::load_jsonl(cfg.corpus_path, cfg.fields);
    auto [members, non_members] = ragmia::split_corpus(records, cfg.split);
    auto splits = ragmia::sample_eval_sets(members, non_members, cfg.split, cfg.prompt);

    auto ids_of = [](const auto& recs) {
        std::vector<std::string> ids;
        for (const auto& r : recs) ids.push_back(r.id);
        return ids;
    };
    nlohmann::json train = nlohmann::json::array(), test = nlohmann::json::array();
    for (const auto& q : splits.train) train.push_back({{"id", q.record_id}, {"label", q.label}});
    for (const auto& q : splits.test) test.push_back({{"id", q.record_id}, {"label", q.label}});
    nlohmann::json manifest = {{"version", 1},
                               {"seed", cfg.split.seed},
                               {"member_fraction", cfg.split.member_fraction},
                               {"members", ids_of(members)},
                               {"non_members", ids_of(non_members)},
                               {"train", train},
                               {"test", test}};
    write_file(out_path, manifest.dump(2) + "\n");
    std::cout << "wrote " << out_path << " (" << members.size() << " members, "
              << non_members.size() << " non-members)\n";
    return 0;
}

int cmd_run(const ragmia::ExperimentConfig& cfg) {
    auto output = ragmia::run_experiment(cfg);
    auto written = ragmia::write_outputs(cfg, output);
    for (const auto& path : written) std::cout << "wrote " << path << "\n";
    for (const auto& rep : output.reports)
        std::cout << rep.attack << ": roc_auc=" << rep.roc_auc << " pr_auc=" << rep.pr_auc
                  << " acc=" << rep.accuracy << "\n";
    return 0;
}

int cmd_score(const ragmia::ExperimentConfig& cfg) {
    auto output = ragmia::run_experiment(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::size_t arity = output.schema_used == cfg.schema
                            ? cfg.schema_arity
                            : ragmia::feature_names(output.schema_used, 1).size();
    write_file(fs::path(cfg.out_dir) / "features_train.csv",
               ragmia::detail::features_csv(output.train_rows, output.schema_used, arity));
    write_file(fs::path(cfg.out_dir) / "features_test.csv",
               ragmia::detail::features_csv(output.test_rows, output.schema_used, arity));
    std::cout << "wrote " << (fs::path(cfg.out_dir) / "features_train.csv").string() << "\n"
              << "wrote " << (fs::path(cfg.out_dir) / "features_test.csv").string() << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::vector<ragmia::AttackReport> reports;
    for (const auto& path : inputs) reports.push_back(ragmia::report_from_json(load_json_file(path)));
    write_file(out_path, ragmia::summary_csv(reports));
    std::cout << "wrote " << out_path << " (" << reports.size() << " attacks)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Membership-inference audit toolkit for RAG knowledge databases"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> out_override;

    auto add_common = [&](CLI::App* sub, bool config_required = true) {
        sub->add_option("--config", config_path, "experiment config JSON")->required(config_required);
        sub->add_option("--seed", seed_override, "override the config's global seed");
        sub->add_option("--out", out_override, "override the config's output directory");
    };

    auto* split = app.add_subcommand("split", "emit the member/non-member split manifest");
    add_common(split);
    std::string split_out = "split_manifest.json";
    split->add_option("--manifest", split_out, "manifest output path");

    auto* run = app.add_subcommand("run", "run the full audit experiment");
    add_common(run);

    auto* score = app.add_subcommand("score", "extract features only, CSV out");
    add_common(score);

    auto* report = app.add_subcommand("report", "merge attack JSONs into a summary CSV");
    std::vector<std::string> report_inputs;
    std::string report_out = "summary.csv";
    report->add_option("inputs", report_inputs, "attack_<name>.json files")->required();
    report->add_option("--out", report_out, "summary CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (report->parsed()) return cmd_report(report_inputs, report_out);
        auto cfg = load_config(config_path, seed_override, out_override);
        if (split->parsed()) {
            if (out_override) split_out = (std::filesystem::path(*out_override) / "split_manifest.json").string();
            return cmd_split(cfg, split_out);
        }
        if (run->parsed()) return cmd_run(cfg);
        if (score->parsed()) return cmd_score(cfg);
    } catch (const ragmia::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
