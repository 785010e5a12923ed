#include <doctest.h>

#include <numeric>
#include <random>

#include "bioace/error.hpp"
#include "bioace/stats/stats.hpp"
#include "oracles.hpp"

using namespace bioace;
using namespace bioace::stats;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("confusion matrix averaging") {
    ConfusionMatrix diag({"a", "b", "c"});
    diag.add("a", "a", 3);
    diag.add("b", "b", 2);
    diag.add("c", "c", 5);
    for (auto avg : {Averaging::macro, Averaging::weighted}) {
        const auto p = prf(diag, avg);
        CHECK(p.precision == 1.0);
        CHECK(p.recall == 1.0);
        CHECK(p.f1 == 1.0);
    }

    ConfusionMatrix bin({"pos", "neg"});
    bin.add("pos", "pos", 3);
    bin.add("neg", "pos", 1);
    bin.add("neg", "neg", 1);
    const auto pos = per_class_prf(bin)[0];
    CHECK(pos.precision == 0.75);
    CHECK(pos.recall == 1.0);
    CHECK(pos.f1 == doctest::Approx(6.0 / 7.0).epsilon(1e-15));

    ConfusionMatrix unseen({"a", "b", "z"});
    unseen.add("a", "a", 2);
    unseen.add("b", "a", 2);
    const auto macro = prf(unseen, Averaging::macro);
    const auto weighted = prf(unseen, Averaging::weighted);
    const auto per = per_class_prf(unseen);
    CHECK(per[2].f1 == 0.0);
    CHECK(macro.f1 == doctest::Approx((per[0].f1 + per[1].f1 + per[2].f1) / 3.0).epsilon(1e-15));
    CHECK(weighted.f1 == doctest::Approx((per[0].f1 * 2 + per[1].f1 * 2) / 4.0).epsilon(1e-15));

    CHECK(kind_of([] { prf(ConfusionMatrix({"a"}), Averaging::macro); }) == ErrorKind::EmptyMatrix);
    CHECK_THROWS_AS(bin.add("pos", "maybe"), Error);
}

TEST_CASE("weighted equals macro when gold supports are equal") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> pick(0, 3);
    const std::vector<std::string> cls{"w", "x", "y", "z"};
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix m(cls);
        for (const auto& g : cls) {
            for (int i = 0; i < 5; ++i) m.add(g, cls[pick(rng)]);
        }
        const auto a = prf(m, Averaging::macro);
        const auto b = prf(m, Averaging::weighted);
        CHECK(a.precision == doctest::Approx(b.precision).epsilon(1e-12));
        CHECK(a.recall == doctest::Approx(b.recall).epsilon(1e-12));
        CHECK(a.f1 == doctest::Approx(b.f1).epsilon(1e-12));
    }
}

TEST_CASE("AUC examples and pair enumeration") {
    const std::vector<double> hi{0.9, 0.8}, lo{0.1, 0.2}, c{0.5, 0.5};
    CHECK(auc(hi, lo) == 1.0);
    CHECK(auc(c, c) == 0.5);
    const std::vector<double> p{0.8, 0.7}, n{0.3, 0.75};
    CHECK(auc(p, n) == 0.75);
    CHECK(kind_of([&] { auc({}, n); }) == ErrorKind::EmptyInput);

    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> size(1, 50), value(0, 12);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> a(size(rng)), b(size(rng));
        for (auto& x : a) x = value(rng) / 4.0;
        for (auto& x : b) x = value(rng) / 4.0;
        REQUIRE(auc(a, b) == oracle::auc(a, b));
    }
}

TEST_CASE("rank correlation examples") {
    const auto x = as_doubles({1, 2, 3});
    const auto y = as_doubles({2, 1, 3});
    CHECK(spearman(x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(spearman(x, as_doubles({3, 2, 1})) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(spearman(x, y) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(kendall(x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kendall(x, y) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(kind_of([&] { kendall(x, as_doubles({4, 4, 4})); }) == ErrorKind::DegenerateInput);
    CHECK(kind_of([&] { spearman(as_doubles({1}), as_doubles({1})); }) == ErrorKind::DegenerateInput);
    CHECK(kind_of([&] { spearman(x, as_doubles({1, 2})); }) == ErrorKind::KeyMismatch);
}

TEST_CASE("tau-b tie fixtures computed by hand") {
    // Pairs: 4 concordant, 0 discordant, one tie in each variable, 6 pairs.
    CHECK(kendall(as_doubles({1, 2, 2, 3}), as_doubles({1, 2, 3, 3})) == doctest::Approx(0.8).epsilon(1e-15));
    // One concordant pair, one tie in each variable, 3 pairs.
    CHECK(kendall(as_doubles({1, 1, 2}), as_doubles({1, 2, 2})) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(average_ranks(as_doubles({10, 20, 20, 5})) == std::vector<double>{2.0, 3.5, 3.5, 1.0});
}

TEST_CASE("rank correlations equal definitional brute force on permutation pairs") {
    std::mt19937_64 rng(19);
    for (int n = 2; n <= 6; ++n) {
        std::vector<int> base(n);
        std::iota(base.begin(), base.end(), 1);
        std::vector<std::vector<double>> perms;
        auto p = base;
        do {
            perms.push_back(as_doubles(p));
        } while (std::next_permutation(p.begin(), p.end()));
        const std::size_t pairs = n <= 4 ? perms.size() * perms.size() : 2000;
        std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
        for (std::size_t k = 0; k < pairs; ++k) {
            const auto& a = n <= 4 ? perms[k / perms.size()] : perms[pick(rng)];
            const auto& b = n <= 4 ? perms[k % perms.size()] : perms[pick(rng)];
            REQUIRE(std::abs(spearman(a, b) - oracle::spearman(a, b)) <= 1e-12);
            REQUIRE(std::abs(kendall(a, b) - oracle::kendall_b(a, b)) <= 1e-12);
        }
    }
}

TEST_CASE("rank correlations with ties equal brute force") {
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<int> v(0, 3);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> a(2 + trial % 9), b(a.size());
        for (auto& x : a) x = v(rng);
        for (auto& x : b) x = v(rng);
        if (std::adjacent_find(a.begin(), a.end(), std::not_equal_to<>()) == a.end()) continue;
        if (std::adjacent_find(b.begin(), b.end(), std::not_equal_to<>()) == b.end()) continue;
        REQUIRE(std::abs(spearman(a, b) - oracle::spearman(a, b)) <= 1e-12);
        REQUIRE(std::abs(kendall(a, b) - oracle::kendall_b(a, b)) <= 1e-12);
    }
}

TEST_CASE("system ranking") {
    const auto r = rank_systems({{"A", 0.9}, {"B", 0.5}, {"C", 0.5}});
    CHECK(r.ranks.at("A") == 1.0);
    CHECK(r.ranks.at("B") == 2.5);
    CHECK(r.ranks.at("C") == 2.5);
    CHECK(kind_of([] { rank_systems({{"A", 1.0}}); }) == ErrorKind::TooFewSystems);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> v(0, 10);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, double> m;
        for (int i = 0; i < 30; ++i) m["M" + std::to_string(i)] = v(rng);
        double sum = 0;
        for (const auto& [_, rank] : rank_systems(m).ranks) sum += rank;
        CHECK(sum == 465.0);
    }
}

TEST_CASE("correlate_rankings") {
    std::map<std::string, double> a, anti;
    for (int i = 0; i < 10; ++i) {
        a["M" + std::to_string(i)] = i * 0.1;
        anti["M" + std::to_string(i)] = -i * 0.1;
    }
    const auto same = correlate_rankings(a, a);
    CHECK(same.spearman == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.kendall == doctest::Approx(1.0).epsilon(1e-12));
    const auto neg = correlate_rankings(a, anti);
    CHECK(neg.spearman == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(neg.kendall == doctest::Approx(-1.0).epsilon(1e-12));
    auto missing = a;
    missing.erase("M3");
    missing["X"] = 0.0;
    CHECK(kind_of([&] { correlate_rankings(a, missing); }) == ErrorKind::KeyMismatch);

    // 30 systems; swapping positions at distances 10, 10, 2, 1, 1 gives sum d^2 = 412,
    // so rho = 1 - 6 * 412 / (30 * 899).
    std::vector<int> order(30);
    std::iota(order.begin(), order.end(), 0);
    for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 10}, {11, 21}, {22, 24}, {25, 26}, {27, 28}})
        std::swap(order[i], order[j]);
    std::map<std::string, double> human, automatic;
    for (int i = 0; i < 30; ++i) {
        human["M" + std::to_string(i)] = 100 - i;
        automatic["M" + std::to_string(order[i])] = 100 - i;
    }
    const auto c = correlate_rankings(automatic, human);
    CHECK(std::abs(c.spearman - 0.908) <= 1e-3);
    CHECK(c.n == 30);
}

TEST_CASE("rank correlations are invariant under increasing transforms") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, double> a, b, a3;
        for (int i = 0; i < 12; ++i) {
            const auto key = "M" + std::to_string(i);
            a[key] = std::round(u(rng) * 4) / 4;
            b[key] = u(rng);
            a3[key] = a[key] * a[key] * a[key];
        }
        const auto x = correlate_rankings(a, b);
        const auto y = correlate_rankings(a3, b);
        CHECK(x.spearman == y.spearman);
        CHECK(x.kendall == y.kendall);
    }
}
