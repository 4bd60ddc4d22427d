#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragmia/corpus.hpp"
#include "ragmia/error.hpp"
#include "ragmia/rng.hpp"
#include "ragmia/textnum.hpp"

namespace ragmia {

inline constexpr const char* kDefaultSystemPrompt =
    "Answer the question based on the context above.";
inline constexpr double kOovLogProb = -13.815510557964274;  // ln(1e-6)

struct KnowledgeEntry {
    std::string record_id;
    std::string question;
    std::string answer;
    Embedding question_embedding;
};

struct KnowledgeStore {
    std::vector<KnowledgeEntry> entries;
    std::size_t retrieval_k = 5;
    std::size_t embedding_dim = kDefaultEmbeddingDim;
};

struct GenerationRequest {
    std::string prompt;
    std::string system_prompt = kDefaultSystemPrompt;
    std::size_t max_tokens = 32;
    std::uint64_t sample_seed = 0;
    // Simulator-only: emit this many "/end"-terminated responses in one call
    // (the multi-prompt feature). Not part of the HTTP wire format; real
    // targets see only the instruction in system_prompt.
    std::size_t n_responses = 1;
};

struct GenerationResult {
    std::string text;
    std::vector<std::string> tokens;
    std::optional<std::vector<double>> token_logprobs;
    std::vector<std::string> retrieved_ids;  // simulator diagnostics

    void validate() const {
        if (token_logprobs) {
            if (token_logprobs->size() != tokens.size())
                throw ValidationError("GenerationResult: token_logprobs length " +
                                      std::to_string(token_logprobs->size()) +
                                      " != token count " + std::to_string(tokens.size()));
            for (double lp : *token_logprobs)
                if (!(std::isfinite(lp) && lp <= 0.0))
                    throw ValidationError("GenerationResult: logprob must be finite and <= 0");
        }
    }
};

// Background unigram language model: member-corpus token frequencies plus a
// small fixed filler vocabulary, normalized to sum 1.
struct UnigramModel {
    std::vector<std::string> tokens;
    std::vector<double> probs;
    std::vector<double> cumulative;
    std::unordered_map<std::string, double> prob_of;

    double log_prob(const std::string& token) const {
        auto it = prob_of.find(token);
        return it == prob_of.end() ? kOovLogProb : std::log(it->second);
    }

    const std::string& sample(SplitMix64& rng) const {
        double u = rng.next_double();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
        if (i >= tokens.size()) i = tokens.size() - 1;
        return tokens[i];
    }
};

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "the", "of", "and", "to", "in", "is", "it", "you", "that", "was", "for",
        "on", "are", "with", "as", "his", "they", "be", "at", "one", "have",
        "this", "from", "or", "had", "by", "but", "some", "what", "there", "we",
        "can", "out", "other", "were", "all", "your", "when", "up", "use", "how",
        "said", "an", "each", "she", "which", "do", "their", "if", "will", "way",
        "about", "many", "then", "them", "would", "like", "so", "these", "her",
        "long", "make", "thing", "him",
    };
    return words;
}

inline UnigramModel build_unigram_model(const std::vector<QaRecord>& member_corpus) {
    std::unordered_map<std::string, double> counts;
    for (const auto& rec : member_corpus) {
        for (auto& tok : tokenize(rec.question)) counts[tok] += 1.0;
        for (auto& tok : tokenize(rec.answer)) counts[tok] += 1.0;
    }
    for (const auto& w : filler_words()) counts[w] += 1.0;

    UnigramModel model;
    model.tokens.reserve(counts.size());
    for (auto& [tok, _] : counts) model.tokens.push_back(tok);
    std::sort(model.tokens.begin(), model.tokens.end());

    double total = 0.0;
    for (const auto& tok : model.tokens) total += counts[tok];
    model.probs.reserve(model.tokens.size());
    model.cumulative.reserve(model.tokens.size());
    double acc = 0.0;
    for (const auto& tok : model.tokens) {
        double p = counts[tok] / total;
        acc += p;
        model.probs.push_back(p);
        model.cumulative.push_back(acc);
        model.prob_of.emplace(tok, p);
    }
    return model;
}

struct SimulatorConfig {
    double copy_rate = 0.9;  // rho
    double p_copy = 0.9;
    std::size_t retrieval_k = 5;
    UnigramModel background;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(copy_rate >= 0.0 && copy_rate <= 1.0))
            throw ValidationError("SimulatorConfig: copy_rate must be in [0,1]");
        if (!(p_copy > 0.0 && p_copy < 1.0))
            throw ValidationError("SimulatorConfig: p_copy must be in (0,1)");
        if (background.tokens.empty())
            throw ValidationError("SimulatorConfig: background vocabulary is empty");
        double sum = 0.0;
        for (double p : background.probs) sum += p;
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("SimulatorConfig: unigram frequencies must sum to 1");
    }
};

inline KnowledgeStore build_store(const std::vector<QaRecord>& member_corpus,
                                  std::size_t retrieval_k = 5,
                                  std::size_t dim = kDefaultEmbeddingDim) {
    KnowledgeStore store;
    store.retrieval_k = retrieval_k;
    store.embedding_dim = dim;
    store.entries.reserve(member_corpus.size());
    for (const auto& rec : member_corpus)
        store.entries.push_back({rec.id, rec.question, rec.answer, embed(tokenize(rec.question), dim)});
    return store;
}

struct RetrievalHit {
    std::string record_id;
    double similarity;
};

/// Top-k by cosine against stored question embeddings, ties broken by
/// record_id ascending.
inline std::vector<RetrievalHit> retrieve(const KnowledgeStore& store,
                                          const std::string& prompt, std::size_t k) {
    if (store.entries.empty()) throw ValidationError("retrieve: empty knowledge store");
    Embedding pe = embed(tokenize(prompt), store.embedding_dim);
    std::vector<std::size_t> order(store.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> sims(store.entries.size());
    for (std::size_t i = 0; i < sims.size(); ++i)
        sims[i] = cosine(pe, store.entries[i].question_embedding);
    std::size_t take = std::min(k, store.entries.size());
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (sims[a] != sims[b]) return sims[a] > sims[b];
                          return store.entries[a].record_id < store.entries[b].record_id;
                      });
    std::vector<RetrievalHit> hits;
    hits.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        hits.push_back({store.entries[order[i]].record_id, sims[order[i]]});
    return hits;
}

namespace detail {

// One response sequence. The copy source is the top-1 retrieved answer; the
// per-token copy probability is rho scaled by the top-1 retrieval similarity,
// so weak retrievals copy less and score higher perplexity. Copied tokens
// carry ln(p_copy), background tokens ln((1-p_copy) * unigram(token)).
inline void generate_sequence(const SimulatorConfig& config, const KnowledgeEntry& top1,
                              double top1_similarity, std::size_t max_tokens,
                              std::uint64_t seq_seed, GenerationResult& out) {
    TokenSeq source = tokenize(top1.answer);
    double effective_rho = config.copy_rate * std::clamp(top1_similarity, 0.0, 1.0);
    SplitMix64 rng(seq_seed);
    for (std::size_t t = 0; t < max_tokens; ++t) {
        if (t < source.size() && rng.next_double() < effective_rho) {
            out.tokens.push_back(source[t]);
            out.token_logprobs->push_back(std::log(config.p_copy));
        } else {
            const std::string& tok = config.background.sample(rng);
            out.tokens.push_back(tok);
            out.token_logprobs->push_back(
                std::log((1.0 - config.p_copy) * config.background.prob_of.at(tok)));
        }
    }
}

}  // namespace detail

/// Deterministic stand-in for the RAG target: retrieve, then emit a token
/// stream mixing copies of the top-1 answer with background unigram draws.
/// Fully determined by (config, store, request.sample_seed).
inline GenerationResult simulate_generate(const SimulatorConfig& config,
                                          const KnowledgeStore& store,
                                          const GenerationRequest& req) {
    config.validate();
    if (req.prompt.empty()) throw ValidationError("simulate_generate: empty prompt");
    if (req.max_tokens < 1) throw ValidationError("simulate_generate: max_tokens must be >= 1");
    auto hits = retrieve(store, req.prompt, std::max<std::size_t>(config.retrieval_k, 1));
    const KnowledgeEntry* top1 = nullptr;
    for (const auto& e : store.entries)
        if (e.record_id == hits.front().record_id) { top1 = &e; break; }

    GenerationResult result;
    result.token_logprobs.emplace();
    for (const auto& h : hits) result.retrieved_ids.push_back(h.record_id);

    std::size_t n_responses = std::max<std::size_t>(req.n_responses, 1);
    for (std::size_t j = 0; j < n_responses; ++j) {
        detail::generate_sequence(config, *top1, hits.front().similarity, req.max_tokens,
                                  req.sample_seed + j, result);
        if (n_responses > 1) {
            result.tokens.push_back("/end");
            result.token_logprobs->push_back(0.0);
        }
    }
    std::string text;
    for (std::size_t i = 0; i < result.tokens.size(); ++i) {
        if (i > 0) text.push_back(' ');
        text += result.tokens[i];
    }
    result.text = std::move(text);
    result.validate();
    return result;
}

/// White-box scoring surface for the baselines: per-token ln(unigram(token)),
/// OOV floored at ln(1e-6). Independent of membership by construction.
inline std::vector<double> score_text(const SimulatorConfig& config, const std::string& text) {
    std::vector<double> out;
    for (const auto& tok : tokenize(text)) out.push_back(config.background.log_prob(tok));
    return out;
}

}  // namespace ragmia
