#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ragmia/error.hpp"
#include "ragmia/rng.hpp"

namespace ragmia {

struct QaRecord {
    std::string id;
    std::string question;
    std::string answer;
};

struct QuerySample {
    std::string record_id;
    std::string prompt;     // p_i
    std::string remainder;  // r_i
    std::string full_text;  // q_i = p_i + " " + r_i
    int label = -1;         // 1 member, 0 non-member, -1 unknown
};

struct SplitSpec {
    double member_fraction = 0.8;
    std::uint64_t seed = 0;
    std::size_t n_train_members = 100;
    std::size_t n_test_members = 100;
    std::size_t n_train_nonmembers = 100;
    std::size_t n_test_nonmembers = 100;

    void validate() const {
        if (!(member_fraction > 0.0 && member_fraction < 1.0))
            throw ValidationError("SplitSpec: member_fraction must be in (0,1)");
    }
};

struct AttackSplits {
    std::vector<QuerySample> train;
    std::vector<QuerySample> test;
};

struct JsonlFieldNames {
    std::string question = "input";
    std::string answer = "output";
    std::string question_fallback = "question";
    std::string answer_fallback = "answer";
};

namespace detail {

inline std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::optional<std::string> pick_field(const nlohmann::json& obj,
                                             const std::string& primary,
                                             const std::string& fallback) {
    for (const auto& key : {primary, fallback}) {
        auto it = obj.find(key);
        if (it != obj.end() && it->is_string()) return it->get<std::string>();
    }
    return std::nullopt;
}

}  // namespace detail

/// One JSON object per line. Ids come from an "id" field when present,
/// otherwise the zero-based line number. Blank lines are skipped.
inline std::vector<QaRecord> load_jsonl(const std::string& path,
                                        const JsonlFieldNames& fields = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("load_jsonl: cannot open " + path);
    std::vector<QaRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        std::size_t this_line = line_no++;
        if (detail::trimmed(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError("load_jsonl: malformed JSON at line " +
                                  std::to_string(this_line) + ": " + e.what());
        }
        if (!obj.is_object())
            throw ValidationError("load_jsonl: line " + std::to_string(this_line) +
                                  " is not a JSON object");
        auto q = detail::pick_field(obj, fields.question, fields.question_fallback);
        if (!q)
            throw ValidationError("load_jsonl: missing field '" + fields.question +
                                  "' at line " + std::to_string(this_line));
        auto a = detail::pick_field(obj, fields.answer, fields.answer_fallback);
        if (!a)
            throw ValidationError("load_jsonl: missing field '" + fields.answer +
                                  "' at line " + std::to_string(this_line));
        QaRecord rec;
        rec.question = detail::trimmed(*q);
        rec.answer = detail::trimmed(*a);
        if (rec.question.empty())
            throw ValidationError("load_jsonl: empty question at line " + std::to_string(this_line));
        if (rec.answer.empty())
            throw ValidationError("load_jsonl: empty answer at line " + std::to_string(this_line));
        if (obj.contains("id") && obj["id"].is_string())
            rec.id = obj["id"].get<std::string>();
        else
            rec.id = std::to_string(this_line);
        records.push_back(std::move(rec));
    }
    return records;
}

/// Seeded shuffle, then the first round(member_fraction * N) records become
/// members (round half up). Same inputs and seed give the same partition.
inline std::pair<std::vector<QaRecord>, std::vector<QaRecord>> split_corpus(
    const std::vector<QaRecord>& records, const SplitSpec& spec) {
    spec.validate();
    if (records.size() < 2) throw ValidationError("split_corpus: need at least 2 records");
    std::vector<QaRecord> shuffled = records;
    seeded_shuffle(shuffled, spec.seed);
    auto n_members = static_cast<std::size_t>(
        std::floor(spec.member_fraction * static_cast<double>(records.size()) + 0.5));
    std::vector<QaRecord> members(shuffled.begin(), shuffled.begin() + n_members);
    std::vector<QaRecord> non_members(shuffled.begin() + n_members, shuffled.end());
    return {std::move(members), std::move(non_members)};
}

enum class PromptMode { QuestionAsPrompt, Fraction };

struct PromptSpec {
    PromptMode mode = PromptMode::QuestionAsPrompt;
    double fraction = 0.5;  // used in Fraction mode only
};

namespace detail {

inline std::vector<std::string> whitespace_split(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream iss(text);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline std::string join_space(const std::vector<std::string>& toks,
                              std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out.push_back(' ');
        out += toks[i];
    }
    return out;
}

}  // namespace detail

/// QuestionAsPrompt: prompt = question, remainder = answer.
/// Fraction(f): prompt = first ceil(f*T) whitespace tokens of the full text,
/// remainder the rest. Full text is always question + " " + answer.
inline QuerySample make_query(const QaRecord& record, const PromptSpec& spec = {}) {
    QuerySample qs;
    qs.record_id = record.id;
    qs.full_text = record.question + " " + record.answer;
    if (spec.mode == PromptMode::QuestionAsPrompt) {
        qs.prompt = record.question;
        qs.remainder = record.answer;
    } else {
        if (!(spec.fraction > 0.0 && spec.fraction < 1.0))
            throw ValidationError("make_query: fraction must be in (0,1)");
        auto toks = detail::whitespace_split(qs.full_text);
        if (toks.size() < 2)
            throw ValidationError("make_query: fraction mode needs at least 2 tokens");
        auto cut = static_cast<std::size_t>(
            std::ceil(spec.fraction * static_cast<double>(toks.size())));
        if (cut >= toks.size()) cut = toks.size() - 1;
        qs.prompt = detail::join_space(toks, 0, cut);
        qs.remainder = detail::join_space(toks, cut, toks.size());
        qs.full_text = detail::join_space(toks, 0, toks.size());
    }
    return qs;
}

/// Draws the 100/100/100/100-style train/test populations: shuffle each pool
/// under a pool-specific seed, take train then test prefixes. Labels: member
/// draws get 1, non-member draws 0.
inline AttackSplits sample_eval_sets(const std::vector<QaRecord>& members,
                                     const std::vector<QaRecord>& non_members,
                                     const SplitSpec& spec,
                                     const PromptSpec& prompt = {}) {
    if (spec.n_train_members + spec.n_test_members > members.size())
        throw ValidationError("sample_eval_sets: member pool too small (" +
                              std::to_string(members.size()) + " available)");
    if (spec.n_train_nonmembers + spec.n_test_nonmembers > non_members.size())
        throw ValidationError("sample_eval_sets: non-member pool too small (" +
                              std::to_string(non_members.size()) + " available)");

    auto draw = [&](const std::vector<QaRecord>& pool, std::uint64_t pool_salt,
                    std::size_t n_train, std::size_t n_test, int label, AttackSplits& out) {
        std::vector<QaRecord> shuffled = pool;
        seeded_shuffle(shuffled, spec.seed ^ pool_salt);
        for (std::size_t i = 0; i < n_train; ++i) {
            auto q = make_query(shuffled[i], prompt);
            q.label = label;
            out.train.push_back(std::move(q));
        }
        for (std::size_t i = n_train; i < n_train + n_test; ++i) {
            auto q = make_query(shuffled[i], prompt);
            q.label = label;
            out.test.push_back(std::move(q));
        }
    };

    AttackSplits splits;
    draw(members, 0x6d656d62ULL, spec.n_train_members, spec.n_test_members, 1, splits);
    draw(non_members, 0x6e6f6e6dULL, spec.n_train_nonmembers, spec.n_test_nonmembers, 0, splits);
    return splits;
}

}  // namespace ragmia
