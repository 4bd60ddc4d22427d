#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ragmia/error.hpp"
#include "ragmia/rng.hpp"

namespace ragmia {

using TokenSeq = std::vector<std::string>;

struct Embedding {
    std::vector<double> values;
    std::size_t dim() const { return values.size(); }
};

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

// Lowercase; ASCII alphanumerics and non-ASCII bytes are token characters,
// everything else separates.
inline TokenSeq tokenize(std::string_view text) {
    TokenSeq tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

/// Signed feature hashing ("hashing trick"): bucket = fnv1a(token) mod dim,
/// sign = popcount parity of the same hash, +-1 accumulated per occurrence.
/// Order-insensitive by construction (bag of tokens).
inline Embedding embed(const TokenSeq& tokens, std::size_t dim = kDefaultEmbeddingDim) {
    if (dim < 2) throw ValidationError("embed: dim must be >= 2");
    Embedding e;
    e.values.assign(dim, 0.0);
    for (const auto& tok : tokens) {
        std::uint64_t h = fnv1a64(tok);
        std::size_t bucket = static_cast<std::size_t>(h % dim);
        double sign = (__builtin_popcountll(h) & 1) ? -1.0 : 1.0;
        e.values[bucket] += sign;
    }
    return e;
}

// Convention: zero-norm input (e.g. an empty generation) scores 0, not an
// error. Output clamped to [-1, 1].
inline double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim())
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// text -> vector. Feature hashing is the default; a live audit can swap in
// an external embedding service here.
using EmbeddingProvider = std::function<Embedding(std::string_view)>;

inline EmbeddingProvider hashing_provider(std::size_t dim = kDefaultEmbeddingDim) {
    return [dim](std::string_view text) { return embed(tokenize(text), dim); };
}

}  // namespace ragmia
