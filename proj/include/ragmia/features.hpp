#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ragmia/corpus.hpp"
#include "ragmia/error.hpp"
#include "ragmia/synonyms.hpp"
#include "ragmia/target.hpp"
#include "ragmia/textnum.hpp"

namespace ragmia {

struct MembershipScore {
    double similarity;  // [-1, 1]
    double perplexity;  // >= 1 when logprobs <= 0
};

enum class FeatureSchema {
    SimilarityPerplexity,
    SingleSimilarity,
    MultiPrompt,
    MultiSample,
    MultiMetric,
};

struct FeatureVector {
    std::vector<double> values;
    FeatureSchema schema = FeatureSchema::SimilarityPerplexity;
};

inline std::string schema_name(FeatureSchema schema) {
    switch (schema) {
        case FeatureSchema::SimilarityPerplexity: return "similarity-perplexity";
        case FeatureSchema::SingleSimilarity: return "single-similarity";
        case FeatureSchema::MultiPrompt: return "multi-prompt";
        case FeatureSchema::MultiSample: return "multi-sample";
        case FeatureSchema::MultiMetric: return "multi-metric";
    }
    return "?";
}

inline std::vector<std::string> feature_names(FeatureSchema schema, std::size_t arity) {
    switch (schema) {
        case FeatureSchema::SimilarityPerplexity: return {"similarity", "perplexity"};
        case FeatureSchema::SingleSimilarity: return {"similarity"};
        case FeatureSchema::MultiMetric:
            return {"similarity", "confidence", "perplexity", "loss", "entropy"};
        case FeatureSchema::MultiPrompt:
        case FeatureSchema::MultiSample: {
            std::vector<std::string> names;
            const char* base = schema == FeatureSchema::MultiPrompt ? "prompt_sim_" : "sample_sim_";
            for (std::size_t i = 0; i < arity; ++i) names.push_back(base + std::to_string(i));
            return names;
        }
    }
    return {};
}

/// exp(-mean(token_logprobs))
inline double perplexity(const std::vector<double>& token_logprobs) {
    if (token_logprobs.empty()) throw ValidationError("perplexity: no scored tokens");
    double sum = 0.0;
    for (double lp : token_logprobs) {
        if (!(std::isfinite(lp) && lp <= 0.0))
            throw ValidationError("perplexity: logprobs must be finite and <= 0");
        sum += lp;
    }
    return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

inline double text_similarity(const std::string& a, const std::string& b,
                              std::size_t dim = kDefaultEmbeddingDim) {
    return cosine(embed(tokenize(a), dim), embed(tokenize(b), dim));
}

/// The 2-D membership score: cosine(target, generation) and perplexity of
/// the generation.
inline MembershipScore membership_score(const QuerySample& query, const GenerationResult& gen) {
    if (!gen.token_logprobs)
        throw ValidationError(
            "membership_score: target supplied no token_logprobs; use the single-similarity schema");
    return {text_similarity(query.full_text, gen.text), perplexity(*gen.token_logprobs)};
}

inline FeatureVector single_similarity(const QuerySample& query, const GenerationResult& gen) {
    return {{text_similarity(query.full_text, gen.text)}, FeatureSchema::SingleSimilarity};
}

inline std::string multi_prompt_instruction(std::size_t m) {
    return "Generate " + std::to_string(m) + " responses, each ending in '/end'.";
}

namespace detail {

inline std::vector<std::string> split_on_marker(const std::string& text, const std::string& marker) {
    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t hit = text.find(marker, pos);
        std::string seg = hit == std::string::npos ? text.substr(pos)
                                                   : text.substr(pos, hit - pos);
        if (!tokenize(seg).empty()) segments.push_back(seg);
        if (hit == std::string::npos) break;
        pos = hit + marker.size();
    }
    return segments;
}

}  // namespace detail

using GenerateFn = std::function<GenerationResult(const GenerationRequest&)>;

/// Ask the target for m responses in one request (instruction appended to
/// the system prompt, "/end" as the separator) and score each response's
/// similarity separately. Targets that ignore the instruction yield fewer
/// segments; missing slots are padded with similarity 0.
inline FeatureVector multi_prompt_features(const QuerySample& query, std::size_t m,
                                           const GenerateFn& gen_fn, std::uint64_t sample_seed,
                                           std::size_t max_tokens,
                                           const std::string& system_prompt = kDefaultSystemPrompt) {
    if (m < 1) throw ValidationError("multi_prompt_features: m must be >= 1");
    GenerationRequest req;
    req.prompt = query.prompt;
    req.system_prompt = system_prompt + " " + multi_prompt_instruction(m);
    req.max_tokens = max_tokens;
    req.sample_seed = sample_seed;
    req.n_responses = m;
    GenerationResult gen = gen_fn(req);

    FeatureVector fv;
    fv.schema = FeatureSchema::MultiPrompt;
    auto segments = detail::split_on_marker(gen.text, "/end");
    for (std::size_t i = 0; i < m; ++i)
        fv.values.push_back(i < segments.size()
                                ? text_similarity(query.full_text, segments[i])
                                : 0.0);
    return fv;
}

namespace detail {

// Augmentation j: deterministic shuffle, then every 7th token swapped for
// its synonym-table entry when one exists. Slot 0 is the identity copy.
inline TokenSeq augment_tokens(const TokenSeq& tokens, std::uint64_t sample_seed, std::size_t j) {
    TokenSeq out = tokens;
    if (j == 0) return out;
    seeded_shuffle(out, sample_seed + j);
    for (std::size_t i = 6; i < out.size(); i += 7)
        if (auto syn = synonym_for(out[i])) out[i] = *syn;
    return out;
}

}  // namespace detail

/// m augmented copies of the target text, each scored against the same
/// generation.
inline FeatureVector multi_sample_features(const QuerySample& query, std::size_t m,
                                           const GenerationResult& gen, std::uint64_t sample_seed,
                                           std::size_t dim = kDefaultEmbeddingDim) {
    if (m < 1) throw ValidationError("multi_sample_features: m must be >= 1");
    Embedding gen_embedding = embed(tokenize(gen.text), dim);
    TokenSeq base = tokenize(query.full_text);
    FeatureVector fv;
    fv.schema = FeatureSchema::MultiSample;
    for (std::size_t j = 0; j < m; ++j)
        fv.values.push_back(cosine(embed(detail::augment_tokens(base, sample_seed, j), dim),
                                   gen_embedding));
    return fv;
}

/// Shannon entropy (nats) of the background distribution renormalized over
/// the distinct query tokens present in its vocabulary.
inline double restricted_entropy(const UnigramModel& model, const TokenSeq& tokens) {
    std::vector<double> probs;
    std::vector<std::string> seen;
    for (const auto& tok : tokens) {
        if (std::find(seen.begin(), seen.end(), tok) != seen.end()) continue;
        seen.push_back(tok);
        auto it = model.prob_of.find(tok);
        if (it != model.prob_of.end()) probs.push_back(it->second);
    }
    double total = 0.0;
    for (double p : probs) total += p;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double p : probs) {
        double q = p / total;
        h -= q * std::log(q);
    }
    return h;
}

/// [similarity, confidence, perplexity, loss, entropy]. Requires the
/// simulator's white-box scoring surface.
inline FeatureVector multi_metric_features(const QuerySample& query, const GenerationResult& gen,
                                           const SimulatorConfig* whitebox) {
    if (whitebox == nullptr)
        throw ValidationError("multi_metric_features: white-box features require simulator");
    if (!gen.token_logprobs)
        throw ValidationError("multi_metric_features: generation carries no token_logprobs");
    double sim = text_similarity(query.full_text, gen.text);
    double mean_lp = 0.0;
    for (double lp : *gen.token_logprobs) mean_lp += lp;
    mean_lp /= static_cast<double>(gen.token_logprobs->size());
    double confidence = std::exp(mean_lp);
    double ppl = perplexity(*gen.token_logprobs);

    auto target_lps = score_text(*whitebox, query.full_text);
    double loss = 0.0;
    for (double lp : target_lps) loss -= lp;
    if (!target_lps.empty()) loss /= static_cast<double>(target_lps.size());

    double entropy = restricted_entropy(whitebox->background, tokenize(query.full_text));
    return {{sim, confidence, ppl, loss, entropy}, FeatureSchema::MultiMetric};
}

}  // namespace ragmia
