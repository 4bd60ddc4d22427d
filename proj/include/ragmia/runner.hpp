#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ragmia/attacks.hpp"
#include "ragmia/corpus.hpp"
#include "ragmia/error.hpp"
#include "ragmia/features.hpp"
#include "ragmia/http_target.hpp"
#include "ragmia/metrics.hpp"
#include "ragmia/target.hpp"

namespace ragmia {

enum class TargetKind { Simulator, Http };

enum class AttackKind { Threshold, Classifier, Loss, Zlib, MinK, Neighborhood };

inline std::string attack_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::Threshold: return "threshold";
        case AttackKind::Classifier: return "classifier";
        case AttackKind::Loss: return "loss";
        case AttackKind::Zlib: return "zlib";
        case AttackKind::MinK: return "mink";
        case AttackKind::Neighborhood: return "neighborhood";
    }
    return "?";
}

inline AttackKind attack_from_name(const std::string& name) {
    for (auto k : {AttackKind::Threshold, AttackKind::Classifier, AttackKind::Loss,
                   AttackKind::Zlib, AttackKind::MinK, AttackKind::Neighborhood})
        if (attack_name(k) == name) return k;
    throw ValidationError("unknown attack '" + name + "'");
}

inline bool attack_needs_whitebox(AttackKind kind) {
    return kind == AttackKind::Loss || kind == AttackKind::Zlib || kind == AttackKind::MinK ||
           kind == AttackKind::Neighborhood;
}

struct ExperimentConfig {
    std::string corpus_path;
    JsonlFieldNames fields;
    SplitSpec split;
    PromptSpec prompt;
    TargetKind target_kind = TargetKind::Simulator;
    double copy_rate = 0.9;
    double p_copy = 0.9;
    std::uint64_t target_seed = 0;
    HttpEndpointConfig http;
    FeatureSchema schema = FeatureSchema::SimilarityPerplexity;
    std::size_t schema_arity = 2;  // m for the multi-* schemas
    std::vector<AttackKind> attacks;
    std::size_t retrieval_k = 5;
    std::size_t max_tokens = 32;
    double mink_k_percent = 20.0;
    std::size_t n_neighbors = 5;
    std::size_t workers = 0;  // 0 = hardware concurrency
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    void validate() const {
        split.validate();
        if (attacks.empty()) throw ValidationError("config: attack list is empty");
        if (target_kind == TargetKind::Http) {
            for (auto a : attacks)
                if (attack_needs_whitebox(a))
                    throw ValidationError("config: attack '" + attack_name(a) +
                                          "' needs white-box access and only runs on the simulator");
            if (schema == FeatureSchema::MultiMetric)
                throw ValidationError("config: multi-metric schema only runs on the simulator");
        }
        for (auto a : attacks)
            if (a == AttackKind::Threshold && schema != FeatureSchema::SimilarityPerplexity &&
                schema != FeatureSchema::SingleSimilarity)
                throw ValidationError(
                    "config: the threshold attack supports only the similarity-perplexity "
                    "and single-similarity schemas");
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
}

inline std::pair<FeatureSchema, std::size_t> parse_schema(const nlohmann::json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "similarity-perplexity") return {FeatureSchema::SimilarityPerplexity, 2};
        if (s == "single-similarity") return {FeatureSchema::SingleSimilarity, 1};
        if (s == "multi-metric") return {FeatureSchema::MultiMetric, 5};
        throw ValidationError("config: unknown feature_schema '" + s + "'");
    }
    if (j.is_object() && j.size() == 1) {
        if (j.contains("multi-prompt"))
            return {FeatureSchema::MultiPrompt, j["multi-prompt"].get<std::size_t>()};
        if (j.contains("multi-sample"))
            return {FeatureSchema::MultiSample, j["multi-sample"].get<std::size_t>()};
    }
    throw ValidationError("config: feature_schema must be a name or {\"multi-prompt\": m} / {\"multi-sample\": m}");
}

}  // namespace detail

/// Strict JSON config: version field required, unknown keys rejected so a
/// saved config replays exactly or not at all. RAG_MIA_TARGET_URL overrides
/// the HTTP base_url.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    detail::reject_unknown_keys(
        j,
        {"version", "corpus", "question_field", "answer_field", "split", "prompt_mode", "target",
         "feature_schema", "attacks", "retrieval_k", "max_tokens", "mink_k_percent", "n_neighbors",
         "workers", "seed", "out"},
        "top level");
    if (!j.contains("version") || j["version"].get<int>() != 1)
        throw ValidationError("config: missing or unsupported version (expected 1)");

    ExperimentConfig cfg;
    cfg.corpus_path = j.at("corpus").get<std::string>();
    if (j.contains("question_field")) cfg.fields.question = j["question_field"].get<std::string>();
    if (j.contains("answer_field")) cfg.fields.answer = j["answer_field"].get<std::string>();

    const auto& sp = j.at("split");
    detail::reject_unknown_keys(sp,
                                {"member_fraction", "seed", "n_train_members", "n_test_members",
                                 "n_train_nonmembers", "n_test_nonmembers"},
                                "split");
    cfg.split.member_fraction = sp.at("member_fraction").get<double>();
    cfg.split.seed = sp.value("seed", 0ULL);
    cfg.split.n_train_members = sp.at("n_train_members").get<std::size_t>();
    cfg.split.n_test_members = sp.at("n_test_members").get<std::size_t>();
    cfg.split.n_train_nonmembers = sp.at("n_train_nonmembers").get<std::size_t>();
    cfg.split.n_test_nonmembers = sp.at("n_test_nonmembers").get<std::size_t>();

    if (j.contains("prompt_mode")) {
        const auto& pm = j["prompt_mode"];
        if (pm.is_string() && pm.get<std::string>() == "question") {
            cfg.prompt.mode = PromptMode::QuestionAsPrompt;
        } else if (pm.is_object() && pm.contains("fraction") && pm.size() == 1) {
            cfg.prompt.mode = PromptMode::Fraction;
            cfg.prompt.fraction = pm["fraction"].get<double>();
        } else {
            throw ValidationError("config: prompt_mode must be \"question\" or {\"fraction\": f}");
        }
    }

    const auto& tgt = j.at("target");
    std::string type = tgt.at("type").get<std::string>();
    if (type == "simulator") {
        detail::reject_unknown_keys(tgt, {"type", "copy_rate", "p_copy", "seed"}, "target");
        cfg.target_kind = TargetKind::Simulator;
        cfg.copy_rate = tgt.value("copy_rate", 0.9);
        cfg.p_copy = tgt.value("p_copy", 0.9);
        cfg.target_seed = tgt.value("seed", 0ULL);
    } else if (type == "http") {
        detail::reject_unknown_keys(
            tgt, {"type", "base_url", "timeout_seconds", "retries", "max_inflight"}, "target");
        cfg.target_kind = TargetKind::Http;
        cfg.http.base_url = tgt.value("base_url", std::string{});
        cfg.http.timeout_seconds = tgt.value("timeout_seconds", 30);
        cfg.http.retries = tgt.value("retries", 2);
        cfg.http.max_inflight = tgt.value("max_inflight", 4);
        if (const char* env = std::getenv("RAG_MIA_TARGET_URL")) cfg.http.base_url = env;
    } else {
        throw ValidationError("config: target.type must be 'simulator' or 'http'");
    }

    if (j.contains("feature_schema"))
        std::tie(cfg.schema, cfg.schema_arity) = detail::parse_schema(j["feature_schema"]);
    for (const auto& name : j.at("attacks").get<std::vector<std::string>>())
        cfg.attacks.push_back(attack_from_name(name));
    cfg.retrieval_k = j.value("retrieval_k", 5ULL);
    cfg.max_tokens = j.value("max_tokens", 32ULL);
    cfg.mink_k_percent = j.value("mink_k_percent", 20.0);
    cfg.n_neighbors = j.value("n_neighbors", 5ULL);
    cfg.workers = j.value("workers", 0ULL);
    cfg.seed = j.value("seed", 0ULL);
    cfg.out_dir = j.value("out", std::string("out"));
    cfg.validate();
    return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["version"] = 1;
    j["corpus"] = cfg.corpus_path;
    j["question_field"] = cfg.fields.question;
    j["answer_field"] = cfg.fields.answer;
    j["split"] = {{"member_fraction", cfg.split.member_fraction},
                  {"seed", cfg.split.seed},
                  {"n_train_members", cfg.split.n_train_members},
                  {"n_test_members", cfg.split.n_test_members},
                  {"n_train_nonmembers", cfg.split.n_train_nonmembers},
                  {"n_test_nonmembers", cfg.split.n_test_nonmembers}};
    if (cfg.prompt.mode == PromptMode::QuestionAsPrompt)
        j["prompt_mode"] = "question";
    else
        j["prompt_mode"] = {{"fraction", cfg.prompt.fraction}};
    if (cfg.target_kind == TargetKind::Simulator)
        j["target"] = {{"type", "simulator"},
                       {"copy_rate", cfg.copy_rate},
                       {"p_copy", cfg.p_copy},
                       {"seed", cfg.target_seed}};
    else
        j["target"] = {{"type", "http"},
                       {"base_url", cfg.http.base_url},
                       {"timeout_seconds", cfg.http.timeout_seconds},
                       {"retries", cfg.http.retries},
                       {"max_inflight", cfg.http.max_inflight}};
    if (cfg.schema == FeatureSchema::MultiPrompt)
        j["feature_schema"] = {{"multi-prompt", cfg.schema_arity}};
    else if (cfg.schema == FeatureSchema::MultiSample)
        j["feature_schema"] = {{"multi-sample", cfg.schema_arity}};
    else
        j["feature_schema"] = schema_name(cfg.schema);
    std::vector<std::string> names;
    for (auto a : cfg.attacks) names.push_back(attack_name(a));
    j["attacks"] = names;
    j["retrieval_k"] = cfg.retrieval_k;
    j["max_tokens"] = cfg.max_tokens;
    j["mink_k_percent"] = cfg.mink_k_percent;
    j["n_neighbors"] = cfg.n_neighbors;
    j["workers"] = cfg.workers;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    return j;
}

inline std::string config_fingerprint(const ExperimentConfig& cfg) {
    std::ostringstream hex;
    hex << std::hex << fnv1a64(config_to_json(cfg).dump());
    return hex.str();
}

// ---- Pipeline ----

struct SampleRow {
    QuerySample query;
    GenerationResult generation;
    std::optional<std::string> error;  // excluded when set
    FeatureVector features;
};

struct ExperimentOutput {
    std::vector<AttackReport> reports;
    nlohmann::json manifest;
    FeatureSchema schema_used;
    std::vector<SampleRow> train_rows;
    std::vector<SampleRow> test_rows;
};

namespace detail {

struct TargetHandle {
    TargetKind kind;
    SimulatorConfig sim;
    KnowledgeStore store;
    std::unique_ptr<HttpTarget> http;

    GenerationResult generate(const GenerationRequest& req) const {
        if (kind == TargetKind::Simulator) return simulate_generate(sim, store, req);
        return http->generate(req);
    }
};

template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n == 0 ? std::size_t{1} : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline void generate_rows(const ExperimentConfig& cfg, const TargetHandle& target,
                          std::vector<SampleRow>& rows) {
    parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
        auto& row = rows[i];
        GenerationRequest req;
        req.prompt = row.query.prompt;
        req.system_prompt = kDefaultSystemPrompt;
        req.max_tokens = cfg.max_tokens;
        req.sample_seed = derive_seed(cfg.seed, row.query.record_id);
        try {
            row.generation = target.generate(req);
        } catch (const std::exception& e) {
            row.error = std::string("generate: ") + e.what();
        }
    });
    // order-independent aggregation: everything downstream sees id order
    std::sort(rows.begin(), rows.end(),
              [](const SampleRow& a, const SampleRow& b) { return a.query.record_id < b.query.record_id; });
}

inline void extract_features(const ExperimentConfig& cfg, const TargetHandle& target,
                             FeatureSchema schema, std::vector<SampleRow>& rows) {
    parallel_for(rows.size(), cfg.workers, [&](std::size_t i) {
        auto& row = rows[i];
        if (row.error) return;
        std::uint64_t sample_seed = derive_seed(cfg.seed, row.query.record_id);
        try {
            switch (schema) {
                case FeatureSchema::SimilarityPerplexity: {
                    auto ms = membership_score(row.query, row.generation);
                    row.features = {{ms.similarity, ms.perplexity}, schema};
                    break;
                }
                case FeatureSchema::SingleSimilarity:
                    row.features = single_similarity(row.query, row.generation);
                    break;
                case FeatureSchema::MultiPrompt:
                    row.features = multi_prompt_features(
                        row.query, cfg.schema_arity,
                        [&](const GenerationRequest& r) { return target.generate(r); },
                        sample_seed, cfg.max_tokens);
                    break;
                case FeatureSchema::MultiSample:
                    row.features = multi_sample_features(row.query, cfg.schema_arity,
                                                         row.generation, sample_seed);
                    break;
                case FeatureSchema::MultiMetric:
                    row.features = multi_metric_features(row.query, row.generation, &target.sim);
                    break;
            }
        } catch (const std::exception& e) {
            row.error = std::string("features: ") + e.what();
        }
    });
}

inline AttackDataset to_dataset(const std::vector<SampleRow>& rows, FeatureSchema schema) {
    AttackDataset ds;
    ds.schema = schema;
    for (const auto& row : rows) {
        if (row.error) continue;
        ds.rows.push_back(row.features);
        ds.labels.push_back(row.query.label);
    }
    return ds;
}

// For the single-similarity schema the perplexity axis is absent; a constant
// column keeps fit_threshold applicable (its rule then never rejects).
inline AttackDataset with_constant_perplexity(const AttackDataset& ds) {
    AttackDataset out = ds;
    out.schema = FeatureSchema::SimilarityPerplexity;
    for (auto& row : out.rows) row.values = {row.values[0], 1.0};
    return out;
}

inline AttackReport evaluate_scored(const std::string& name, const std::vector<double>& train_scores,
                                    const std::vector<int>& train_labels,
                                    const std::vector<double>& test_scores,
                                    const std::vector<int>& test_labels) {
    AttackReport rep;
    rep.attack = name;
    rep.n_train = train_labels.size();
    rep.n_test = test_labels.size();
    rep.roc_auc = roc_auc({test_scores, test_labels});
    rep.pr_auc = pr_auc({test_scores, test_labels});

    // operating point: the score cut that maximizes balanced accuracy on train
    std::vector<double> candidates = train_scores;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(candidates.back() + 1.0);
    double best_cut = candidates.front(), best_ba = -1.0;
    for (double cut : candidates) {
        std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
        for (std::size_t i = 0; i < train_scores.size(); ++i) {
            int pred = train_scores[i] >= cut ? 1 : 0;
            if (train_labels[i] == 1)
                (pred ? tp : fn)++;
            else
                (pred ? fp : tn)++;
        }
        double ba = ((tp + fn ? double(tp) / (tp + fn) : 0.0) +
                     (tn + fp ? double(tn) / (tn + fp) : 0.0)) / 2.0;
        if (ba > best_ba) { best_ba = ba; best_cut = cut; }
    }
    std::vector<int> preds;
    for (double s : test_scores) preds.push_back(s >= best_cut ? 1 : 0);
    auto cm = classification_metrics(preds, test_labels);
    rep.accuracy = cm.accuracy;
    rep.precision = cm.precision;
    rep.recall = cm.recall;
    rep.f1 = cm.f1;
    rep.extra = {{"train_threshold", best_cut}, {"train_balanced_accuracy", best_ba}};
    return rep;
}

inline std::vector<int> labels_of(const std::vector<SampleRow>& rows) {
    std::vector<int> out;
    for (const auto& r : rows)
        if (!r.error) out.push_back(r.query.label);
    return out;
}

}  // namespace detail

inline AttackReport run_threshold_attack(const AttackDataset& train, const AttackDataset& test,
                                         FeatureSchema schema) {
    AttackDataset tr = schema == FeatureSchema::SingleSimilarity
                           ? detail::with_constant_perplexity(train)
                           : train;
    AttackDataset te = schema == FeatureSchema::SingleSimilarity
                           ? detail::with_constant_perplexity(test)
                           : test;
    ThresholdPair theta = fit_threshold(tr);
    std::vector<int> preds;
    std::vector<double> pred_scores;
    for (const auto& row : te.rows) {
        int p = predict_threshold(theta, {row.values[0], row.values[1]});
        preds.push_back(p);
        pred_scores.push_back(static_cast<double>(p));
    }
    AttackReport rep;
    rep.attack = "threshold";
    rep.n_train = tr.labels.size();
    rep.n_test = te.labels.size();
    // AUC over binary predictions: equals balanced accuracy under the
    // midrank tie rule. Labeled as prediction-AUC in extra.
    rep.roc_auc = roc_auc({pred_scores, te.labels});
    rep.pr_auc = pr_auc({pred_scores, te.labels});
    auto cm = classification_metrics(preds, te.labels);
    rep.accuracy = cm.accuracy;
    rep.precision = cm.precision;
    rep.recall = cm.recall;
    rep.f1 = cm.f1;
    rep.extra = {{"auc_kind", "prediction"},
                 {"model", threshold_to_json(theta)},
                 {"train_balanced_accuracy", threshold_balanced_accuracy(tr, theta)},
                 {"test_balanced_accuracy", threshold_balanced_accuracy(te, theta)}};
    return rep;
}

inline AttackReport run_classifier_attack(const AttackDataset& train, const AttackDataset& test) {
    ClassifierModel model = fit_classifier(train);
    std::vector<double> probs;
    std::vector<int> preds;
    for (const auto& row : test.rows) {
        double p = predict_proba(model, row);
        probs.push_back(p);
        preds.push_back(p >= 0.5 ? 1 : 0);
    }
    AttackReport rep;
    rep.attack = "classifier";
    rep.n_train = train.labels.size();
    rep.n_test = test.labels.size();
    rep.roc_auc = roc_auc({probs, test.labels});
    rep.pr_auc = pr_auc({probs, test.labels});
    auto cm = classification_metrics(preds, test.labels);
    rep.accuracy = cm.accuracy;
    rep.precision = cm.precision;
    rep.recall = cm.recall;
    rep.f1 = cm.f1;
    std::vector<double> train_probs;
    for (const auto& row : train.rows) train_probs.push_back(predict_proba(model, row));
    rep.extra = {{"auc_kind", "probability"},
                 {"model", classifier_to_json(model)},
                 {"train_roc_auc", roc_auc({train_probs, train.labels})}};
    if (model.degenerate_feature_warning) rep.extra["warning"] = "zero-variance feature, scale forced to 1";
    return rep;
}

/// Load -> split -> sample -> build store -> generate -> features -> fit on
/// train -> evaluate on test. Deterministic for simulator targets.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    auto records = load_jsonl(cfg.corpus_path, cfg.fields);
    auto [members, non_members] = split_corpus(records, cfg.split);
    auto splits = sample_eval_sets(members, non_members, cfg.split, cfg.prompt);

    detail::TargetHandle target;
    target.kind = cfg.target_kind;
    if (cfg.target_kind == TargetKind::Simulator) {
        target.store = build_store(members, cfg.retrieval_k);
        target.sim.copy_rate = cfg.copy_rate;
        target.sim.p_copy = cfg.p_copy;
        target.sim.retrieval_k = cfg.retrieval_k;
        target.sim.seed = cfg.target_seed;
        target.sim.background = build_unigram_model(members);
        target.sim.validate();
    } else {
        target.http = std::make_unique<HttpTarget>(cfg.http);
    }

    ExperimentOutput out;
    for (const auto& q : splits.train) out.train_rows.push_back({q, {}, std::nullopt, {}});
    for (const auto& q : splits.test) out.test_rows.push_back({q, {}, std::nullopt, {}});

    detail::generate_rows(cfg, target, out.train_rows);
    detail::generate_rows(cfg, target, out.test_rows);

    std::vector<std::string> warnings;
    FeatureSchema schema = cfg.schema;
    if (schema == FeatureSchema::SimilarityPerplexity && cfg.target_kind == TargetKind::Http) {
        bool missing_lps = false;
        for (const auto* rows : {&out.train_rows, &out.test_rows})
            for (const auto& row : *rows)
                if (!row.error && !row.generation.token_logprobs) missing_lps = true;
        if (missing_lps) {
            schema = FeatureSchema::SingleSimilarity;
            warnings.push_back(
                "target returned no token_logprobs; feature schema downgraded to single-similarity");
        }
    }
    out.schema_used = schema;

    detail::extract_features(cfg, target, schema, out.train_rows);
    detail::extract_features(cfg, target, schema, out.test_rows);

    AttackDataset train = detail::to_dataset(out.train_rows, schema);
    AttackDataset test = detail::to_dataset(out.test_rows, schema);
    std::string fingerprint = config_fingerprint(cfg);

    auto whitebox_scores = [&](const std::vector<SampleRow>& rows, AttackKind kind) {
        std::vector<double> scores;
        for (const auto& row : rows) {
            if (row.error) continue;
            const std::string& text = row.query.full_text;
            std::uint64_t seed = derive_seed(cfg.seed, row.query.record_id);
            switch (kind) {
                case AttackKind::Loss:
                    scores.push_back(baseline_loss_score(target.sim, text));
                    break;
                case AttackKind::Zlib:
                    scores.push_back(baseline_zlib_score(target.sim, text));
                    break;
                case AttackKind::MinK:
                    scores.push_back(
                        baseline_minkprob_score(score_text(target.sim, text), cfg.mink_k_percent));
                    break;
                case AttackKind::Neighborhood:
                    scores.push_back(
                        baseline_neighborhood_score(target.sim, text, cfg.n_neighbors, seed));
                    break;
                default:
                    break;
            }
        }
        return scores;
    };

    for (auto kind : cfg.attacks) {
        AttackReport rep;
        if (kind == AttackKind::Threshold) {
            rep = run_threshold_attack(train, test, schema);
        } else if (kind == AttackKind::Classifier) {
            rep = run_classifier_attack(train, test);
        } else {
            rep = detail::evaluate_scored(attack_name(kind),
                                          whitebox_scores(out.train_rows, kind),
                                          detail::labels_of(out.train_rows),
                                          whitebox_scores(out.test_rows, kind),
                                          detail::labels_of(out.test_rows));
        }
        rep.config_fingerprint = fingerprint;
        out.reports.push_back(std::move(rep));
    }

    nlohmann::json exclusions = nlohmann::json::array();
    for (const auto* rows : {&out.train_rows, &out.test_rows})
        for (const auto& row : *rows)
            if (row.error)
                exclusions.push_back({{"record_id", row.query.record_id}, {"error", *row.error}});

    out.manifest = {{"version", 1},
                    {"config", config_to_json(cfg)},
                    {"config_fingerprint", fingerprint},
                    {"schema_used", schema_name(schema)},
                    {"system_prompt", kDefaultSystemPrompt},
                    {"embedding", {{"provider", "feature-hashing-fnv1a"}, {"dim", kDefaultEmbeddingDim}}},
                    {"warnings", warnings},
                    {"exclusions", exclusions},
                    {"n_excluded", exclusions.size()},
                    {"n_train", train.labels.size()},
                    {"n_test", test.labels.size()}};
    return out;
}

// ---- File outputs ----

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

inline std::string features_csv(const std::vector<SampleRow>& rows, FeatureSchema schema,
                                std::size_t arity) {
    std::ostringstream out;
    out.precision(9);
    out << std::fixed;
    auto names = feature_names(schema, arity);
    out << "record_id";
    for (const auto& n : names) out << ',' << n;
    out << ",label\n";
    for (const auto& row : rows) {
        if (row.error) continue;
        out << row.query.record_id;
        for (double v : row.features.values) out << ',' << v;
        out << ',' << row.query.label << '\n';
    }
    return out.str();
}

}  // namespace detail

inline std::string summary_csv(const std::vector<AttackReport>& reports) {
    std::string out = report_csv_header() + "\n";
    for (const auto& r : reports) out += report_csv_row(r) + "\n";
    return out;
}

/// Writes manifest.json, features_{train,test}.csv, attack_<name>.json per
/// attack, and summary.csv into cfg.out_dir.
inline std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                              const ExperimentOutput& out) {
    namespace fs = std::filesystem;
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        detail::write_text(dir / name, content);
        written.push_back((dir / name).string());
    };
    std::size_t arity = out.schema_used == cfg.schema
                            ? cfg.schema_arity
                            : feature_names(out.schema_used, 1).size();
    emit("manifest.json", out.manifest.dump(2) + "\n");
    emit("features_train.csv", detail::features_csv(out.train_rows, out.schema_used, arity));
    emit("features_test.csv", detail::features_csv(out.test_rows, out.schema_used, arity));
    for (const auto& rep : out.reports)
        emit("attack_" + rep.attack + ".json", report_to_json(rep).dump(2) + "\n");
    emit("summary.csv", summary_csv(out.reports));
    return written;
}

}  // namespace ragmia
