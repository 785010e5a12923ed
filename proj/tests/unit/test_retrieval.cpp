#include <doctest.h>

#include <random>

#include "bioace/retrieval/bm25.hpp"
#include "bioace/retrieval/tokenizer.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bioace::retrieval;

namespace {

const std::vector<std::string> kVocab{"iron",    "ferritin", "anemia", "aspirin", "platelet", "heart",
                                      "insulin", "glucose",  "dose",   "trial",   "patients", "risk"};

std::vector<IndexUnit> random_corpus(std::mt19937_64& rng, std::size_t docs) {
    std::uniform_int_distribution<std::size_t> len(1, 25), word(0, kVocab.size() - 1);
    std::vector<IndexUnit> out;
    for (std::size_t d = 0; d < docs; ++d) {
        std::string text;
        for (std::size_t i = len(rng); i > 0; --i) text += kVocab[word(rng)] + (i % 4 == 0 ? ". " : " ");
        out.push_back({"d" + std::to_string(d), text});
    }
    return out;
}

std::string random_query(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> len(1, 4), word(0, kVocab.size() + 2);
    std::string q;
    for (std::size_t i = len(rng); i > 0; --i) {
        const auto w = word(rng);
        q += (w < kVocab.size() ? kVocab[w] : std::string("unseen")) + " ";
    }
    return q;
}

void check_against_oracle(const std::vector<IndexUnit>& units, const std::string& query, std::size_t k) {
    const auto index = build_index(units);
    std::vector<std::vector<std::string>> raw;
    for (const auto& u : units) raw.push_back(oracle::tokens(u.text));
    std::vector<std::pair<double, std::size_t>> expected;
    for (std::size_t d = 0; d < units.size(); ++d) expected.emplace_back(oracle::bm25(query, raw, d), d);
    std::stable_sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.first > b.first; });

    const auto top = bm25_top_k(query, index, {}, k);
    REQUIRE(top.size() == std::min(k, units.size()));
    for (std::size_t i = 0; i < top.size(); ++i) {
        CHECK(std::abs(top[i].score - expected[i].first) <= 1e-12);
        CHECK(std::abs(top[i].score - oracle::bm25(query, raw, top[i].doc)) <= 1e-12);
        if (i > 0) {
            CHECK(top[i - 1].score >= top[i].score);
            if (top[i - 1].score == top[i].score) CHECK(top[i - 1].doc < top[i].doc);
        }
    }
}

}  // namespace

TEST_CASE("tokenizer lowercases and drops short tokens") {
    CHECK(tokenize("Iron-deficiency, a B12 issue!") == std::vector<std::string>{"iron", "deficiency", "b12", "issue"});
    CHECK(tokenize("").empty());
}

TEST_CASE("idf follows the smoothed formula") {
    CHECK(bm25_idf(10, 2) == doctest::Approx(std::log((10 - 2 + 0.5) / (2 + 0.5) + 1)).epsilon(1e-15));
    CHECK(bm25_idf(10, 10) > 0.0);
}

TEST_CASE("absent query terms score zero and keep doc order") {
    const std::vector<IndexUnit> units{{"a", "iron anemia"}, {"b", "aspirin heart"}, {"c", "glucose"}};
    const auto top = bm25_top_k("zinc", build_index(units), {}, 10);
    REQUIRE(top.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(top[i].doc == i);
        CHECK(top[i].score == 0.0);
    }
}

TEST_CASE("a single-document corpus returns that document") {
    const auto top = bm25_top_k("iron", build_index({{"only", "iron stores"}}), {}, 5);
    REQUIRE(top.size() == 1);
    CHECK(top[0].score > 0.0);
}

TEST_CASE("top-k equals the brute-force formula on toy corpora") {
    const std::vector<IndexUnit> toy{
        {"1", "Iron deficiency anemia and ferritin"}, {"2", "Ferritin measures iron stores"},
        {"3", "Aspirin and platelets"},               {"4", "Iron iron iron supplements"},
        {"5", "Heart attack risk"},                   {"6", "Serum ferritin thresholds for anemia"},
        {"7", "Glucose control"},                     {"8", "Intravenous iron dosing"},
        {"9", "Ferritin"},                            {"10", "Anemia in pregnancy"}};
    check_against_oracle(toy, "iron ferritin", 10);

    std::mt19937_64 rng(5);
    for (int c = 0; c < 10; ++c) {
        const auto units = random_corpus(rng, 1 + c * 5);
        for (int q = 0; q < 10; ++q) {
            const auto query = random_query(rng);
            for (std::size_t k : {std::size_t{1}, std::size_t{3}, units.size(), units.size() + 5})
                check_against_oracle(units, query, k);
        }
    }
}

TEST_CASE("adding a query term occurrence never lowers the score") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto units = random_corpus(rng, 8);
        const auto query = random_query(rng);
        const auto terms = query_terms(query);
        if (terms.empty()) continue;
        std::vector<std::vector<std::string>> raw;
        for (const auto& u : units) raw.push_back(oracle::tokens(u.text));
        const double before = oracle::bm25(query, raw, 0);
        // Hold the average length fixed by swapping a non-query token for a query token.
        auto& doc = raw[0];
        const auto it = std::find_if(doc.begin(), doc.end(), [&](const std::string& t) {
            return std::find(terms.begin(), terms.end(), t) == terms.end();
        });
        if (it == doc.end()) continue;
        *it = terms.front();
        CHECK(oracle::bm25(query, raw, 0) >= before - 1e-12);

        std::string text;
        for (const auto& t : doc) text += t + " ";
        units[0].text = text;
        const auto lib = bm25_scores(query, build_index(units), {});
        CHECK(std::abs(lib[0] - oracle::bm25(query, raw, 0)) <= 1e-12);
    }
}

TEST_CASE("index save/load round trip") {
    std::mt19937_64 rng(3);
    const auto index = build_index(random_corpus(rng, 12));
    test_support::TempDir dir;
    save_index(index, dir / "index.json");
    CHECK(load_index(dir / "index.json") == index);
}
