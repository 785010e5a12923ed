#include <doctest.h>

#include <random>
#include <set>

#include "bioace/error.hpp"
#include "bioace/nugget/alignment.hpp"
#include "bioace/nugget/nuggetize.hpp"
#include "bioace/nugget/similarity.hpp"
#include "bioace/nugget/threshold.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bioace;
using namespace bioace::nugget;
using kernels::Matrix;

namespace {

std::set<std::pair<std::size_t, std::size_t>> pair_set(const AlignmentResult& r) {
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (const auto& p : r.pairs) out.emplace(p.sys, p.gold);
    return out;
}

/// Independent sweep of the scalarized objective over the thresholds first/scale .. last/scale.
double oracle_best_threshold(const std::vector<TuningInstance>& train, long first, long last, double scale) {
    double best_t = 0.0, best = -1e300;
    for (long i = first; i <= last; ++i) {
        const double t = static_cast<double>(i) / scale;
        double f1 = 0, sim = 0, cnt = 0;
        for (const auto& inst : train) {
            std::vector<std::vector<bool>> matched(inst.probability.rows, std::vector<bool>(inst.probability.cols));
            double s = 0;
            std::size_t m = 0;
            for (std::size_t r = 0; r < inst.probability.rows; ++r) {
                for (std::size_t c = 0; c < inst.probability.cols; ++c) {
                    if (inst.probability(r, c) >= t) {
                        matched[r][c] = true;
                        s += inst.similarity(r, c);
                        ++m;
                    }
                }
            }
            f1 += oracle::nugget_prf(matched).f1;
            sim += m ? s / static_cast<double>(m) : 0.0;
            cnt += static_cast<double>(m) / static_cast<double>(inst.probability.rows * inst.probability.cols);
        }
        const double value = (f1 + sim + cnt) / static_cast<double>(train.size());
        if (value > best + 1e-12) {
            best = value;
            best_t = t;
        }
    }
    return best_t;
}

TuningInstance instance(std::vector<std::vector<double>> prob, std::vector<std::vector<double>> sim) {
    return {Matrix(std::move(sim)), Matrix(std::move(prob))};
}

}  // namespace

TEST_CASE("nugget list parsing strips blanks, bullets and numbering") {
    CHECK(parse_nugget_list("n1\n\nn2\n") == std::vector<std::string>{"n1", "n2"});
    CHECK(parse_nugget_list("- n1\n2. n2") == std::vector<std::string>{"n1", "n2"});
    CHECK(parse_nugget_list("* a\n(3) b\n4) c\n  \n") == std::vector<std::string>{"a", "b", "c"});
    CHECK(parse_nugget_list("-5 mg is the dose") == std::vector<std::string>{"-5 mg is the dose"});
}

TEST_CASE("extract_nuggets issues the generation prompt and parses the response") {
    const std::string example = "Lymphocytes and viruses compete for iron.\nViruses need iron to replicate.\n";
    auto gw = test_support::canned_generation(example);
    const auto nuggets = extract_nugget_texts("During infections, a battle for iron takes place.", *gw,
                                              test_support::endpoint(gateway::Capability::generate));
    CHECK(std::find(nuggets.begin(), nuggets.end(), "Viruses need iron to replicate.") != nuggets.end());
    CHECK(nugget_generation_prompt("XYZ").ends_with("Text: XYZ"));

    auto empty = test_support::canned_generation("\n \n");
    try {
        extract_nugget_texts("Some text.", *empty, test_support::endpoint(gateway::Capability::generate));
        FAIL("expected EmptyNuggetList");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyNuggetList);
    }
}

TEST_CASE("similarity matrix from the gateway") {
    const nlohmann::json fixture{
        {"embed", {{"vectors", {{"x", {1.0, 0.0}}, {"y", {0.6, 0.8}}, {"z", {0.0, 1.0}}, {"zero", {0.0, 0.0}}}}}}};
    auto gw = test_support::fixture_gateway(fixture);
    const auto ep = test_support::endpoint(gateway::Capability::embed);
    CHECK(build_similarity_matrix({"x"}, {"x"}, *gw, ep).values(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(build_similarity_matrix({"x"}, {"z"}, *gw, ep).values(0, 0) == 0.0);
    const auto m = build_similarity_matrix({"x", "y"}, {"x"}, *gw, ep);
    CHECK(m.values(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.values(1, 0) == doctest::Approx(0.6).epsilon(1e-12));
    try {
        build_similarity_matrix({"zero"}, {"x"}, *gw, ep);
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroVector);
    }
}

TEST_CASE("alignment rule examples") {
    const Matrix sim(2, 2, 0.5);
    const auto a = align_by_probability(Matrix({{0.9, 0.1}, {0.2, 0.8}}), sim, 0.6035);
    CHECK(pair_set(a) == std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
    CHECK(align_by_probability(Matrix(2, 2, 0.0), sim, 0.5).pairs.empty());
    const auto b = align_by_probability(Matrix({{0.9, 0.88}, {0.2, 0.1}}), sim, 0.6);
    CHECK(pair_set(b) == std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {0, 1}});
    const auto prf = score_prf(b, 2, 2);
    CHECK(prf.precision == 0.5);
    CHECK(prf.recall == 1.0);
    CHECK(prf.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    const auto greedy = align_by_probability(Matrix({{0.9, 0.88}, {0.85, 0.1}}), sim, 0.6,
                                             MatchingMode::greedy_one_to_one);
    CHECK(pair_set(greedy) == std::set<std::pair<std::size_t, std::size_t>>{{0, 0}});
}

TEST_CASE("score_prf edge cases") {
    AlignmentResult diag;
    for (std::size_t i = 0; i < 3; ++i) diag.pairs.push_back({i, i, 1.0, 1.0});
    const auto full = score_prf(diag, 3, 3);
    CHECK(full.precision == 1.0);
    CHECK(full.recall == 1.0);
    CHECK(full.f1 == 1.0);
    const auto none = score_prf(AlignmentResult{}, 3, 2);
    CHECK(none.f1 == 0.0);
    CHECK_THROWS_AS(score_prf(AlignmentResult{}, 0, 2), Error);
}

TEST_CASE("score_prf equals a brute-force recount on 500 random alignments") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::bernoulli_distribution coin(0.25);
    for (int trial = 0; trial < 500; ++trial) {
        const auto rows = dim(rng), cols = dim(rng);
        std::vector<std::vector<bool>> matched(rows, std::vector<bool>(cols));
        AlignmentResult r;
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                if (coin(rng)) {
                    matched[i][j] = true;
                    r.pairs.push_back({i, j, 1.0, 1.0});
                }
            }
        }
        const auto got = score_prf(r, rows, cols);
        const auto want = oracle::nugget_prf(matched);
        REQUIRE(got.precision == want.precision);
        REQUIRE(got.recall == want.recall);
        REQUIRE(got.f1 == want.f1);
        CHECK((got.f1 == 0.0) == r.pairs.empty());
    }
}

TEST_CASE("raising the threshold never adds a pair, and one-to-one mode uses each nugget once") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Matrix p(1 + trial % 6, 1 + (trial / 6) % 6);
        for (auto& x : p.data) x = u(rng);
        const double t1 = u(rng), t2 = u(rng);
        const auto lo = pair_set(align_by_probability(p, p, std::min(t1, t2)));
        const auto hi = pair_set(align_by_probability(p, p, std::max(t1, t2)));
        CHECK(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));

        const auto one = align_by_probability(p, p, std::min(t1, t2), MatchingMode::greedy_one_to_one);
        std::set<std::size_t> rows, cols;
        for (const auto& pr : one.pairs) {
            CHECK(rows.insert(pr.sys).second);
            CHECK(cols.insert(pr.gold).second);
            CHECK(lo.count({pr.sys, pr.gold}) == 1);
        }
    }
}

TEST_CASE("degenerate models fall back to the raw cosine rule") {
    SimilarityMatrix m;
    m.values = Matrix({{0.8, 0.74}, {0.75, 0.1}});
    const auto r = align_nuggets(m, nullptr, 0.6);
    CHECK(r.fallback_used);
    CHECK(pair_set(r) == std::set<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 0}});

    BgmmModel one;
    one.components.push_back({1.0, 0.5, 0.01, 1, 1, 0.5, 1, 0.01});
    CHECK(align_nuggets(m, &one, 0.6).fallback_used);
    CHECK_THROWS_AS(probability_matrix(m.values, one), Error);
}

TEST_CASE("shipped default thresholds") {
    CHECK(default_threshold_for("all-MiniLM-L6-v2") == 0.6267);
    CHECK(default_threshold_for("sup-simcse-roberta-large") == 0.6035);
    CHECK(default_threshold_for("all-mpnet-base-v2") == 0.6211);
    CHECK(default_threshold_for("sentence-transformers/all-mpnet-base-v2") == 0.6211);
    CHECK_FALSE(default_threshold_for("unknown-model").has_value());
}

TEST_CASE("grid points are exact four-decimal values") {
    const auto points = ThresholdGrid{}.points();
    REQUIRE(points.size() == 4501);
    CHECK(points.front() == 0.5);
    CHECK(points[101] == 0.5101);
    CHECK(points.back() == 0.95);
}

TEST_CASE("tuner picks the smallest point of the best plateau") {
    const std::vector<TuningInstance> train{
        instance({{0.95, 0.58}, {0.30, 0.62}}, {{0.95, -0.30}, {-0.35, 0.90}})};
    const auto best = tune_threshold(train);
    CHECK(best.threshold == 0.5801);
    CHECK(best.avg_f1 == 1.0);
    CHECK(best.avg_alignments == 0.5);
}

TEST_CASE("tuner matches an independent grid sweep") {
    const std::vector<TuningInstance> constructed{
        instance({{0.90, 0.62}, {0.55, 0.80}}, {{0.95, -0.30}, {-0.35, 0.90}})};
    CHECK(tune_threshold(constructed).threshold == doctest::Approx(0.6201).epsilon(1e-12));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0), s(-0.2, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<TuningInstance> train;
        for (int q = 0; q < 3; ++q) {
            Matrix p(2 + q, 3), sim(2 + q, 3);
            for (std::size_t i = 0; i < p.data.size(); ++i) {
                p.data[i] = std::round(u(rng) * 1000.0) / 1000.0;
                sim.data[i] = s(rng);
            }
            train.push_back({sim, p});
        }
        const ThresholdGrid grid{0.5, 0.95, 1e-3};
        const auto got = tune_threshold(train, grid, {}, kernels::Backend::serial);
        CHECK(got.threshold == doctest::Approx(oracle_best_threshold(train, 500, 950, 1000.0)).epsilon(1e-12));
        CHECK(tune_threshold(train, grid, {}, kernels::Backend::openmp).threshold == got.threshold);
    }
    CHECK_THROWS_AS(tune_threshold(std::vector<TuningInstance>{}), Error);
}
