#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "ragmia/error.hpp"
#include "ragmia/features.hpp"
#include "ragmia/synonyms.hpp"
#include "ragmia/target.hpp"

namespace ragmia {

struct ThresholdPair {
    double theta_similarity;
    double theta_perplexity;
};

struct AttackDataset {
    std::vector<FeatureVector> rows;
    std::vector<int> labels;  // {0,1}
    FeatureSchema schema = FeatureSchema::SimilarityPerplexity;

    void validate() const {
        if (rows.size() != labels.size())
            throw ValidationError("AttackDataset: row/label count mismatch");
        if (rows.empty()) throw ValidationError("AttackDataset: empty");
        std::size_t arity = rows.front().values.size();
        for (const auto& r : rows)
            if (r.values.size() != arity)
                throw ValidationError("AttackDataset: ragged feature rows");
        bool has_pos = false, has_neg = false;
        for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg)
            throw ValidationError("AttackDataset: need both labels for fitting");
    }
};

struct ClassifierModel {
    std::vector<double> weights;  // one per feature
    double bias = 0.0;
    std::vector<double> means;
    std::vector<double> scales;
    FeatureSchema schema = FeatureSchema::SimilarityPerplexity;
    bool degenerate_feature_warning = false;
};

/// Member iff similarity >= theta_similarity and perplexity <= theta_perplexity
/// (both inclusive).
inline int predict_threshold(const ThresholdPair& theta, const MembershipScore& x) {
    return (x.similarity >= theta.theta_similarity && x.perplexity <= theta.theta_perplexity) ? 1 : 0;
}

namespace detail {

struct ThresholdEval {
    double balanced_accuracy;
    double tpr;
};

inline ThresholdEval eval_threshold(const AttackDataset& data, const ThresholdPair& theta) {
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        MembershipScore s{data.rows[i].values[0], data.rows[i].values[1]};
        int pred = predict_threshold(theta, s);
        if (data.labels[i] == 1)
            (pred == 1 ? tp : fn)++;
        else
            (pred == 1 ? fp : tn)++;
    }
    double tpr = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
    double tnr = tn + fp ? static_cast<double>(tn) / (tn + fp) : 0.0;
    return {(tpr + tnr) / 2.0, tpr};
}

inline std::vector<double> axis_candidates(const AttackDataset& data, std::size_t axis) {
    std::vector<double> vals;
    for (const auto& r : data.rows) vals.push_back(r.values[axis]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    // one candidate beyond each extreme so "accept all" / "reject all" rules
    // are reachable on both axes
    vals.insert(vals.begin(), vals.front() - 1.0);
    vals.push_back(vals.back() + 1.0);
    return vals;
}

}  // namespace detail

/// Exhaustive grid over observed feature values, maximizing balanced
/// accuracy (TPR+TNR)/2 of the two-sided rule. Ties broken by higher TPR,
/// then lower theta_similarity, then higher theta_perplexity.
inline ThresholdPair fit_threshold(const AttackDataset& train) {
    train.validate();
    if (train.rows.front().values.size() != 2)
        throw ValidationError("fit_threshold: requires the similarity-perplexity schema");
    auto sims = detail::axis_candidates(train, 0);
    auto ppls = detail::axis_candidates(train, 1);

    ThresholdPair best{sims.front(), ppls.back()};
    detail::ThresholdEval best_eval{-1.0, -1.0};
    for (double ts : sims) {
        for (double tp : ppls) {
            ThresholdPair cand{ts, tp};
            auto eval = detail::eval_threshold(train, cand);
            bool better = eval.balanced_accuracy > best_eval.balanced_accuracy ||
                          (eval.balanced_accuracy == best_eval.balanced_accuracy &&
                           (eval.tpr > best_eval.tpr ||
                            (eval.tpr == best_eval.tpr &&
                             (ts < best.theta_similarity ||
                              (ts == best.theta_similarity && tp > best.theta_perplexity)))));
            if (better) {
                best = cand;
                best_eval = eval;
            }
        }
    }
    return best;
}

inline double threshold_balanced_accuracy(const AttackDataset& data, const ThresholdPair& theta) {
    return detail::eval_threshold(data, theta).balanced_accuracy;
}

struct LogisticHyperparams {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    double l2_penalty = 1e-4;
};

/// Logistic regression, full-batch gradient descent, zero init, features
/// standardized on train. L2 applies to weights, not the bias.
inline ClassifierModel fit_classifier(const AttackDataset& train,
                                      const LogisticHyperparams& hyper = {}) {
    train.validate();
    const std::size_t n = train.rows.size();
    const std::size_t d = train.rows.front().values.size();
    for (const auto& r : train.rows)
        for (double v : r.values)
            if (!std::isfinite(v)) throw ValidationError("fit_classifier: non-finite feature");

    ClassifierModel model;
    model.schema = train.schema;
    model.means.assign(d, 0.0);
    model.scales.assign(d, 0.0);
    for (const auto& r : train.rows)
        for (std::size_t j = 0; j < d; ++j) model.means[j] += r.values[j];
    for (std::size_t j = 0; j < d; ++j) model.means[j] /= static_cast<double>(n);
    for (const auto& r : train.rows)
        for (std::size_t j = 0; j < d; ++j) {
            double dev = r.values[j] - model.means[j];
            model.scales[j] += dev * dev;
        }
    for (std::size_t j = 0; j < d; ++j) {
        model.scales[j] = std::sqrt(model.scales[j] / static_cast<double>(n));
        if (model.scales[j] <= 0.0) {
            model.scales[j] = 1.0;
            model.degenerate_feature_warning = true;
        }
    }

    std::vector<std::vector<double>> z(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            z[i][j] = (train.rows[i].values[j] - model.means[j]) / model.scales[j];

    model.weights.assign(d, 0.0);
    model.bias = 0.0;
    std::vector<double> grad(d);
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double score = model.bias;
            for (std::size_t j = 0; j < d; ++j) score += model.weights[j] * z[i][j];
            double err = 1.0 / (1.0 + std::exp(-score)) - static_cast<double>(train.labels[i]);
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[i][j];
            grad_bias += err;
        }
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = grad[j] / static_cast<double>(n) + hyper.l2_penalty * model.weights[j];
            model.weights[j] -= hyper.learning_rate * grad[j];
        }
        model.bias -= hyper.learning_rate * grad_bias / static_cast<double>(n);
    }
    return model;
}

inline double predict_proba(const ClassifierModel& model, const FeatureVector& x) {
    if (x.values.size() != model.weights.size())
        throw ValidationError("predict_proba: feature arity does not match model schema");
    double score = model.bias;
    for (std::size_t j = 0; j < x.values.size(); ++j)
        score += model.weights[j] * (x.values[j] - model.means[j]) / model.scales[j];
    return 1.0 / (1.0 + std::exp(-score));
}

// ---- Baselines: all score the TARGET SAMPLE's own text, not the generation.

/// Loss attack: -mean NLL of the text under the white-box unigram model.
inline double baseline_loss_score(const SimulatorConfig& whitebox, const std::string& text) {
    auto lps = score_text(whitebox, text);
    if (lps.empty()) throw ValidationError("baseline_loss_score: empty text");
    double sum = 0.0;
    for (double lp : lps) sum += lp;
    return sum / static_cast<double>(lps.size());
}

inline constexpr int kZlibCompressionLevel = 6;

inline std::size_t zlib_compressed_size(const std::string& text, int level = kZlibCompressionLevel) {
    uLongf bound = compressBound(static_cast<uLong>(text.size()));
    std::vector<Bytef> buf(bound);
    int rc = compress2(buf.data(), &bound, reinterpret_cast<const Bytef*>(text.data()),
                       static_cast<uLong>(text.size()), level);
    if (rc != Z_OK) throw RuntimeError("zlib compression failed, rc=" + std::to_string(rc));
    return static_cast<std::size_t>(bound);
}

/// Zlib entropy attack: loss calibrated by the DEFLATE-compressed byte size
/// of the text (fixed level 6).
inline double baseline_zlib_score(const SimulatorConfig& whitebox, const std::string& text) {
    auto lps = score_text(whitebox, text);
    if (lps.empty()) throw ValidationError("baseline_zlib_score: empty text");
    double mean_lp = 0.0;
    for (double lp : lps) mean_lp += lp;
    mean_lp /= static_cast<double>(lps.size());
    return mean_lp / static_cast<double>(zlib_compressed_size(text));
}

/// Min-k% Prob: mean of the ceil(k/100 * n) smallest logprobs.
inline double baseline_minkprob_score(std::vector<double> token_logprobs, double k_percent = 20.0) {
    if (token_logprobs.empty()) throw ValidationError("baseline_minkprob_score: empty input");
    if (!(k_percent > 0.0 && k_percent <= 100.0))
        throw ValidationError("baseline_minkprob_score: k_percent must be in (0,100]");
    auto take = static_cast<std::size_t>(
        std::ceil(k_percent / 100.0 * static_cast<double>(token_logprobs.size())));
    std::sort(token_logprobs.begin(), token_logprobs.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += token_logprobs[i];
    return sum / static_cast<double>(take);
}

namespace detail {

inline double mean_nll(const SimulatorConfig& whitebox, const TokenSeq& tokens) {
    double sum = 0.0;
    for (const auto& tok : tokens) sum -= whitebox.background.log_prob(tok);
    return tokens.empty() ? 0.0 : sum / static_cast<double>(tokens.size());
}

// Neighbor j: one seeded adjacent swap plus one seeded token replacement
// (synonym-table entry when present, else the corpus's most frequent token).
inline TokenSeq make_neighbor(const SimulatorConfig& whitebox, const TokenSeq& tokens,
                              std::uint64_t seed, std::size_t j) {
    TokenSeq out = tokens;
    SplitMix64 rng(seed + j);
    std::size_t swap_at = static_cast<std::size_t>(rng.next_below(out.size() - 1));
    std::swap(out[swap_at], out[swap_at + 1]);
    std::size_t repl_at = static_cast<std::size_t>(rng.next_below(out.size()));
    if (auto syn = synonym_for(out[repl_at])) {
        out[repl_at] = *syn;
    } else {
        const auto& model = whitebox.background;
        std::size_t best = static_cast<std::size_t>(
            std::max_element(model.probs.begin(), model.probs.end()) - model.probs.begin());
        out[repl_at] = model.tokens[best];
    }
    return out;
}

}  // namespace detail

/// Neighborhood attack: mean(neighbor losses) - target loss.
inline double baseline_neighborhood_score(const SimulatorConfig& whitebox, const std::string& text,
                                          std::size_t n_neighbors, std::uint64_t seed) {
    if (n_neighbors < 1) throw ValidationError("baseline_neighborhood_score: n_neighbors must be >= 1");
    TokenSeq tokens = tokenize(text);
    if (tokens.size() < 2)
        throw ValidationError("baseline_neighborhood_score: text needs at least 2 tokens");
    double target_loss = detail::mean_nll(whitebox, tokens);
    double neighbor_sum = 0.0;
    for (std::size_t j = 1; j <= n_neighbors; ++j)
        neighbor_sum += detail::mean_nll(whitebox, detail::make_neighbor(whitebox, tokens, seed, j));
    return neighbor_sum / static_cast<double>(n_neighbors) - target_loss;
}

// ---- Serialization for replayable audits.

inline nlohmann::json threshold_to_json(const ThresholdPair& theta) {
    return {{"version", 1},
            {"type", "threshold"},
            {"schema", schema_name(FeatureSchema::SimilarityPerplexity)},
            {"theta_similarity", theta.theta_similarity},
            {"theta_perplexity", theta.theta_perplexity}};
}

inline ThresholdPair threshold_from_json(const nlohmann::json& j) {
    return {j.at("theta_similarity").get<double>(), j.at("theta_perplexity").get<double>()};
}

inline nlohmann::json classifier_to_json(const ClassifierModel& model) {
    return {{"version", 1},
            {"type", "logistic"},
            {"schema", schema_name(model.schema)},
            {"weights", model.weights},
            {"bias", model.bias},
            {"means", model.means},
            {"scales", model.scales}};
}

inline ClassifierModel classifier_from_json(const nlohmann::json& j) {
    ClassifierModel model;
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.means = j.at("means").get<std::vector<double>>();
    model.scales = j.at("scales").get<std::vector<double>>();
    return model;
}

}  // namespace ragmia
