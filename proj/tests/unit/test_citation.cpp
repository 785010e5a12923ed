#include <doctest.h>

#include <cmath>
#include <random>

#include "bioace/citation/citation.hpp"
#include "bioace/error.hpp"
#include "label_cases.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bioace;
using namespace bioace::citation;
using Q = QuaternaryLabel;

namespace {

Q to_lib(oracle::Q q) {
    switch (q) {
    case oracle::S: return Q::supports;
    case oracle::C: return Q::contradicts;
    case oracle::N: return Q::neutral;
    case oracle::R: break;
    }
    return Q::not_relevant;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::IoError;
}

core::Document doc_with(std::vector<std::string> sentences) {
    core::Document d;
    d.pmid = "p";
    d.title = "T";
    d.sentences = std::move(sentences);
    return d;
}

std::vector<double> unit_at(double cosine) { return {cosine, std::sqrt(1.0 - cosine * cosine)}; }

}  // namespace

TEST_CASE("adversarial label outputs parse correctly or raise UnparsableLabel") {
    const auto ep = test_support::endpoint(gateway::Capability::generate);
    for (const auto& c : label_cases::cases()) {
        CAPTURE(c.raw);
        auto gw = test_support::canned_generation(c.raw);
        if (c.expected) {
            CHECK(gw->generate_label("p", label_cases::labels(c.set), ep) == *c.expected);
        } else {
            CHECK_THROWS_AS(gw->generate_label("p", label_cases::labels(c.set), ep), UnparsableLabelError);
        }
    }
    CHECK(label_cases::cases().size() == 30);
}

TEST_CASE("label mappings are total and consistent") {
    for (auto q : {Q::supports, Q::contradicts, Q::neutral, Q::not_relevant}) {
        CHECK(to_binary(q) == to_binary(to_ternary(q)));
        CHECK(from_scheme_label(scheme_label(q, Scheme::ternary), Scheme::ternary) ==
              (q == Q::not_relevant ? Q::neutral : q));
    }
    CHECK(to_ternary(Q::not_relevant) == TernaryLabel::neutral);
    CHECK(to_binary(TernaryLabel::support) == BinaryLabel::attributable);
    CHECK(to_binary(TernaryLabel::contradict) == BinaryLabel::not_attributable);
    CHECK(gold_label(core::CitationLabel::supporting, Scheme::binary) == "attributable");
    for (auto g : {core::CitationLabel::contradicting, core::CitationLabel::neutral, core::CitationLabel::not_relevant})
        CHECK(gold_label(g, Scheme::binary) == "not attributable");
    CHECK(gold_label(core::CitationLabel::not_relevant, Scheme::ternary) == "neutral");
    CHECK(scheme_classes(Scheme::binary) == std::vector<std::string>{"attributable", "not attributable"});
}

TEST_CASE("attribution prompts") {
    const auto b = binary_prompt("C.", "R.");
    CHECK(b.starts_with("### Instruction:\nPlease solely verify whether the reference can support the claim."));
    CHECK(b.find("Claim: C.") != std::string::npos);
    CHECK(b.find("Reference: R.") != std::string::npos);
    CHECK(b.ends_with("### Output:"));
    CHECK(ternary_prompt("C.", "R.").find("neutral") != std::string::npos);
    const auto n = nugget_list_prompt({"a1", "a2"}, {"d1"});
    CHECK(n.find("- a1\n- a2") != std::string::npos);
    CHECK(n.find("- d1") != std::string::npos);
}

TEST_CASE("document and nugget-list judges parse constrained labels") {
    const auto ep = test_support::endpoint(gateway::Capability::generate);
    core::Document d = doc_with({"S."});
    d.abstract_text = "S.";
    CHECK(judge_sentence_document("c", d, Scheme::binary, *test_support::canned_generation("attributable"), ep) ==
          "attributable");
    CHECK(judge_sentence_document("c", d, Scheme::ternary, *test_support::canned_generation("Neutral."), ep) ==
          "neutral");
    CHECK(judge_nugget_lists({"a"}, {"b"}, *test_support::canned_generation("Supports"), ep) == Q::supports);
    CHECK(judge_nugget_lists({"a"}, {"b"}, *test_support::canned_generation("not relevant"), ep) == Q::not_relevant);
    CHECK(kind_of([&] { judge_nugget_lists({}, {"b"}, *test_support::canned_generation("x"), ep); }) ==
          ErrorKind::EmptyNuggetList);
}

TEST_CASE("max_sim_sentence picks the argmax with the smallest index on ties") {
    const nlohmann::json fixture{{"embed",
                                  {{"vectors",
                                    {{"claim", {1.0, 0.0}},
                                     {"A.", unit_at(0.2)},
                                     {"B.", unit_at(0.9)},
                                     {"C.", unit_at(0.4)},
                                     {"D.", unit_at(0.7)},
                                     {"E.", unit_at(0.7)}}}}}};
    auto gw = test_support::fixture_gateway(fixture);
    const auto ep = test_support::endpoint(gateway::Capability::embed);
    CHECK(max_sim_sentence("claim", doc_with({"A.", "B.", "C."}), *gw, ep).sentence_index == 1);
    CHECK(max_sim_sentence("claim", doc_with({"A."}), *gw, ep).sentence_index == 0);
    const auto tie = max_sim_sentence("claim", doc_with({"D.", "E."}), *gw, ep);
    CHECK(tie.sentence_index == 0);
    CHECK(tie.text == "D.");
    CHECK(kind_of([&] { max_sim_sentence("claim", doc_with({}), *gw, ep); }) == ErrorKind::EmptyDocument);
}

TEST_CASE("aggregation rubric examples") {
    CHECK(aggregate_pair_labels({{Q::supports, Q::neutral}, {Q::not_relevant, Q::supports}}) == Q::supports);
    CHECK(aggregate_pair_labels({{Q::supports, Q::contradicts}}) == Q::contradicts);
    CHECK(aggregate_pair_labels({{Q::not_relevant, Q::not_relevant}}) == Q::not_relevant);
    CHECK(aggregate_pair_labels({{Q::supports}, {Q::neutral}}) == Q::neutral);
    CHECK(aggregate_pair_labels({{Q::supports}, {Q::neutral}}, true) == Q::supports);
}

TEST_CASE("aggregation equals the truth table on all 2x2 grids") {
    for (int code = 0; code < 256; ++code) {
        std::vector<std::vector<oracle::Q>> o(2, std::vector<oracle::Q>(2));
        std::vector<std::vector<Q>> g(2, std::vector<Q>(2));
        for (int cell = 0; cell < 4; ++cell) {
            const auto q = static_cast<oracle::Q>((code >> (2 * cell)) & 3);
            o[cell / 2][cell % 2] = q;
            g[cell / 2][cell % 2] = to_lib(q);
        }
        REQUIRE(aggregate_pair_labels(g) == to_lib(oracle::aggregate(o, false)));
        REQUIRE(aggregate_pair_labels(g, true) == to_lib(oracle::aggregate(o, true)));
    }
}

TEST_CASE("contradiction dominates on random larger grids") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> dim(1, 6), label(0, 3);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::vector<oracle::Q>> o(dim(rng));
        const auto cols = dim(rng);
        std::vector<std::vector<Q>> g;
        bool any_c = false;
        for (auto& row : o) {
            row.resize(cols);
            std::vector<Q> lib;
            for (auto& q : row) {
                q = static_cast<oracle::Q>(label(rng));
                any_c = any_c || q == oracle::C;
                lib.push_back(to_lib(q));
            }
            g.push_back(lib);
        }
        const auto got = aggregate_pair_labels(g);
        CHECK((got == Q::contradicts) == any_c);
        CHECK(got == to_lib(oracle::aggregate(o, false)));
    }
}

TEST_CASE("score threshold fitting") {
    const std::vector<double> scores{0.9, 0.8, 0.6, 0.4, 0.2};
    const std::vector<bool> gold{true, true, false, true, false};
    const auto fit = fit_score_threshold(scores, gold);
    CHECK(fit.threshold == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::abs(fit.f1 - 6.0 / 7.0) <= 1e-9);

    const std::vector<double> separated{0.1, 0.2, 0.7, 0.9};
    const auto sep = fit_score_threshold(separated, {false, false, true, true});
    CHECK(sep.f1 == 1.0);
    CHECK(sep.threshold == doctest::Approx(0.45).epsilon(1e-12));

    const std::vector<double> two{0.1, 0.2};
    CHECK(kind_of([&] { fit_score_threshold(two, {true, true}); }) == ErrorKind::DegenerateLabels);
    CHECK(kind_of([&] { fit_score_threshold(two, {true}); }) == ErrorKind::KeyMismatch);
}

TEST_CASE("score threshold fitting equals an exhaustive sweep") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> grid(0, 30);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 25;
        std::vector<double> scores(n);
        std::vector<bool> gold(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = grid(rng) / 30.0;
            gold[i] = coin(rng);
        }
        gold[0] = true;
        gold[1] = false;
        const auto got = fit_score_threshold(scores, gold);
        const auto want = oracle::fit_threshold(scores, gold);
        REQUIRE(got.f1 == want.f1);
        REQUIRE(got.threshold == want.threshold);
        CHECK(attributable_f1(scores, gold, got.threshold) == got.f1);
    }
}

TEST_CASE("majority-positive data pushes the threshold low") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> scores;
        std::vector<bool> gold;
        for (int i = 0; i < 60; ++i) {
            const bool pos = u(rng) < 0.8;
            scores.push_back(std::clamp(u(rng) * 0.8 + (pos ? 0.15 : 0.0), 0.0, 1.0));
            gold.push_back(pos);
        }
        gold[0] = false;
        auto sorted = scores;
        std::sort(sorted.begin(), sorted.end());
        const double median = (sorted[29] + sorted[30]) / 2.0;
        CHECK(fit_score_threshold(scores, gold).threshold <= median);
    }
}

TEST_CASE("system citation metrics") {
    core::Answer answer{"S", "q", {}, {}};
    auto add = [&](std::string id, std::vector<std::string> cites) {
        core::AnswerSentence s;
        s.id = std::move(id);
        s.citations = std::move(cites);
        answer.sentences.push_back(s);
    };
    add("a", {"1"});
    add("b", {"2"});
    add("c", {});
    const std::vector<const core::Answer*> answers{&answer};
    const auto m = system_citation_metrics(answers, {{{"a", "1"}, Q::supports}, {{"b", "2"}, Q::neutral}});
    CHECK(m.citation_coverage == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(m.citation_support_rate == 0.5);
    CHECK(m.citation_contradict_rate == 0.0);
    CHECK(m.citation_support_rate + m.citation_contradict_rate + m.citation_neutral_rate +
              m.citation_not_relevant_rate ==
          1.0);

    const auto c = system_citation_metrics(answers, {{{"a", "1"}, Q::contradicts}, {{"b", "2"}, Q::contradicts}});
    CHECK(c.citation_coverage == 0.0);
    CHECK(c.citation_contradict_rate == 1.0);

    core::Answer bare{"S", "q", {}, {}};
    core::AnswerSentence s;
    s.id = "x";
    bare.sentences.push_back(s);
    const auto none = system_citation_metrics({&bare}, {});
    CHECK(none.citation_coverage == 0.0);
    CHECK(none.citation_support_rate == 0.0);

    CHECK(kind_of([&] { system_citation_metrics(answers, {{{"a", "1"}, Q::supports}}); }) ==
          ErrorKind::PreconditionFailed);
}
