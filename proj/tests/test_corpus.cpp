#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "ragmia/corpus.hpp"
#include "testutil.hpp"

using namespace ragmia;

namespace {

std::string write_lines(const std::vector<std::string>& lines, const std::string& name) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    for (const auto& l : lines) out << l << "\n";
    return path.string();
}

}  // namespace

TEST_CASE("load_jsonl reads valid lines in order with line-number ids") {
    auto path = write_lines({R"({"input":"q one","output":"a one"})",
                             R"({"input":"q two","output":"a two"})",
                             R"({"question":"q three","answer":"a three"})"},
                            "ragmia_corpus_ok.jsonl");
    auto records = load_jsonl(path);
    REQUIRE(records.size() == 3);
    CHECK(records[0].id == "0");
    CHECK(records[1].id == "1");
    CHECK(records[2].id == "2");
    CHECK(records[2].question == "q three");  // fallback field names
    CHECK(records[0].answer == "a one");
}

TEST_CASE("load_jsonl on empty file returns empty list") {
    auto path = write_lines({}, "ragmia_corpus_empty.jsonl");
    CHECK(load_jsonl(path).empty());
}

TEST_CASE("load_jsonl errors name the offending line") {
    auto path = write_lines({R"({"input":"q","output":"a"})", R"({"input":"q","output":"a"})", "{not json"},
                            "ragmia_corpus_bad.jsonl");
    CHECK_THROWS_WITH_AS(load_jsonl(path), doctest::Contains("line 2"), ValidationError);

    auto path2 = write_lines({R"({"input":"q","output":"a"})", R"({"input":"q only"})"},
                             "ragmia_corpus_missing.jsonl");
    try {
        load_jsonl(path2);
        FAIL("expected error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("output") != std::string::npos);
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("split_corpus cardinality and determinism") {
    auto records = testutil::synth_corpus(10, 42);
    SplitSpec spec;
    spec.member_fraction = 0.8;
    spec.seed = 7;
    auto [m1, n1] = split_corpus(records, spec);
    CHECK(m1.size() == 8);
    CHECK(n1.size() == 2);
    auto [m2, n2] = split_corpus(records, spec);
    for (std::size_t i = 0; i < m1.size(); ++i) CHECK(m1[i].id == m2[i].id);
    for (std::size_t i = 0; i < n1.size(); ++i) CHECK(n1[i].id == n2[i].id);
}

TEST_CASE("split_corpus rounds half up at corpus scale") {
    // 24665 * 0.8 = 19732
    std::vector<QaRecord> records;
    for (int i = 0; i < 24665; ++i)
        records.push_back({std::to_string(i), "q", "a"});
    SplitSpec spec;
    spec.member_fraction = 0.8;
    auto [members, non_members] = split_corpus(records, spec);
    CHECK(members.size() == 19732);
    CHECK(non_members.size() == 4933);
}

TEST_CASE("split_corpus rejects tiny corpora") {
    std::vector<QaRecord> one = {{"0", "q", "a"}};
    CHECK_THROWS_AS(split_corpus(one, SplitSpec{}), ValidationError);
}

TEST_CASE("split_corpus partition property over random corpora") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SplitMix64 rng(seed);
        std::size_t n = 2 + rng.next_below(998);
        auto records = testutil::synth_corpus(n, seed * 31 + 1);
        SplitSpec spec;
        spec.member_fraction = 0.1 + 0.8 * rng.next_double();
        spec.seed = rng.next_u64();
        auto [members, non_members] = split_corpus(records, spec);
        std::set<std::string> all;
        for (const auto& r : members) all.insert(r.id);
        std::size_t member_count = all.size();
        CHECK(member_count == members.size());  // no duplicates
        for (const auto& r : non_members) all.insert(r.id);
        CHECK(all.size() == n);                             // union is input
        CHECK(member_count + non_members.size() == n);      // disjoint
    }
}

TEST_CASE("sample_eval_sets draws disjoint labeled train/test") {
    auto records = testutil::synth_corpus(1000, 5);
    SplitSpec spec;
    spec.member_fraction = 0.8;
    spec.seed = 3;
    spec.n_train_members = spec.n_test_members = 100;
    spec.n_train_nonmembers = spec.n_test_nonmembers = 50;
    auto [members, non_members] = split_corpus(records, spec);
    auto splits = sample_eval_sets(members, non_members, spec);
    CHECK(splits.train.size() == 150);
    CHECK(splits.test.size() == 150);

    std::set<std::string> train_ids, test_ids;
    for (const auto& q : splits.train) train_ids.insert(q.record_id);
    for (const auto& q : splits.test) test_ids.insert(q.record_id);
    CHECK(train_ids.size() == 150);
    CHECK(test_ids.size() == 150);
    for (const auto& id : test_ids) CHECK(train_ids.count(id) == 0);

    std::size_t train_members = 0;
    for (const auto& q : splits.train) train_members += (q.label == 1);
    CHECK(train_members == 100);
}

TEST_CASE("sample_eval_sets empty request and pool exhaustion") {
    auto records = testutil::synth_corpus(100, 1);
    SplitSpec spec;
    spec.seed = 1;
    auto [members, non_members] = split_corpus(records, spec);

    spec.n_train_members = spec.n_test_members = 0;
    spec.n_train_nonmembers = spec.n_test_nonmembers = 0;
    auto empty = sample_eval_sets(members, non_members, spec);
    CHECK(empty.train.empty());
    CHECK(empty.test.empty());

    spec.n_train_nonmembers = 3000;
    CHECK_THROWS_WITH_AS(sample_eval_sets(members, non_members, spec),
                         doctest::Contains("non-member pool"), ValidationError);
}

TEST_CASE("make_query question-as-prompt") {
    QaRecord rec{"r", "Q1", "A1"};
    auto q = make_query(rec);
    CHECK(q.prompt == "Q1");
    CHECK(q.remainder == "A1");
    CHECK(q.full_text == "Q1 A1");
}

TEST_CASE("make_query fraction mode takes a ceiling prefix") {
    QaRecord rec{"r", "t1 t2 t3 t4", "t5 t6 t7 t8 t9 t10"};
    PromptSpec spec{PromptMode::Fraction, 0.5};
    auto q = make_query(rec, spec);
    CHECK(q.prompt == "t1 t2 t3 t4 t5");
    CHECK(q.remainder == "t6 t7 t8 t9 t10");
    CHECK(q.prompt + " " + q.remainder == q.full_text);
}

TEST_CASE("make_query fraction mode rejects single-token text") {
    QaRecord rec{"r", "only", ""};
    rec.answer = "";
    PromptSpec spec{PromptMode::Fraction, 0.5};
    CHECK_THROWS_AS(make_query(rec, spec), ValidationError);
}
