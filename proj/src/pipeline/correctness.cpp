#include "bioace/error.hpp"
#include "bioace/pipeline/pipelines.hpp"
#include "bioace/util/parallel.hpp"
#include "common.hpp"

namespace bioace::pipeline {

using nlohmann::json;
using correctness::Verdict;

std::unique_ptr<correctness::FragmentJudge> make_judge(const EvalContext& ctx, JudgeKind kind, double threshold) {
    switch (kind) {
        case JudgeKind::gen:
            return std::make_unique<correctness::GenerationJudge>(ctx.gateway,
                                                                  ctx.config.endpoint(gateway::Capability::generate));
        case JudgeKind::nli:
            return std::make_unique<correctness::NliJudge>(ctx.gateway, ctx.config.endpoint(gateway::Capability::nli),
                                                           threshold);
        case JudgeKind::cosine:
            return std::make_unique<correctness::CosineJudge>(ctx.gateway,
                                                              ctx.config.endpoint(gateway::Capability::embed), threshold);
    }
    fail(ErrorKind::PreconditionFailed, "unknown judge");
}

namespace {

json prf_json(const stats::Prf& p) {
    return {{"precision", stats::real(p.precision)}, {"recall", stats::real(p.recall)}, {"f1", stats::real(p.f1)}};
}

json scores_json(const correctness::SimNliScores& s) {
    return {{"pairs", s.pairs},
            {"avg_sim_pos", stats::real(s.avg_sim_pos)},
            {"avg_sim_neg", stats::real(s.avg_sim_neg)},
            {"avg_nli_pos", stats::real(s.avg_nli_pos)},
            {"avg_nli_neg", stats::real(s.avg_nli_neg)},
            {"accuracy_sim", stats::real(s.accuracy_sim)},
            {"accuracy_nli", stats::real(s.accuracy_nli)},
            {"auc_sim", stats::real(s.auc_sim)},
            {"auc_nli", stats::real(s.auc_nli)}};
}

void classify(const EvalContext& ctx, const CorrectnessOptions& options, stats::EvalReport& report) {
    auto judge = make_judge(ctx, options.judge, options.judge_threshold);
    struct Item {
        const core::AnswerSentence* sentence;
        std::vector<const core::Document*> docs;
        correctness::CorrectnessVerdict verdict;
    };
    std::vector<Item> items;
    for (const auto* a : detail::sorted_answers(ctx.corpus)) {
        for (const auto& s : a->sentences) {
            Item item{&s, {}, {s.id, Verdict::incorrect, std::nullopt}};
            const auto& pmids = options.supported_only
                                    ? (s.gold_supporting_docs ? *s.gold_supporting_docs : std::vector<std::string>{})
                                    : s.citations;
            for (const auto& pmid : pmids) {
                if (const auto* d = ctx.corpus.find_document(pmid)) item.docs.push_back(d);
            }
            items.push_back(std::move(item));
        }
    }
    parallel_for_index(items.size(), ctx.workers, [&](std::size_t i) {
        auto& item = items[i];
        if (item.docs.empty()) return;
        item.verdict = correctness::judge_sentence(*item.sentence, item.docs, *judge, options.fragments,
                                                   !options.deterministic_deciding);
    });

    json sentences = json::array();
    detail::MeanTable by_system;
    stats::ConfusionMatrix cm({"correct", "incorrect"});
    const auto name = [](Verdict v) { return v == Verdict::correct ? "correct" : "incorrect"; };
    for (const auto& item : items) {
        const auto& s = *item.sentence;
        json row{{"sentence_id", s.id},
                 {"question_id", s.question_id},
                 {"system_id", s.system_id},
                 {"documents", item.docs.size()},
                 {"verdict", name(item.verdict.verdict)},
                 {"deciding_fragment", nullptr}};
        if (item.verdict.deciding_fragment)
            row["deciding_fragment"] = {{"pmid", item.verdict.deciding_fragment->pmid},
                                        {"start_sentence", item.verdict.deciding_fragment->start_sentence}};
        if (s.gold_supporting_docs) {
            const auto gold = s.gold_supporting_docs->empty() ? Verdict::incorrect : Verdict::correct;
            row["gold"] = name(gold);
            cm.add(name(gold), name(item.verdict.verdict));
        }
        sentences.push_back(std::move(row));
        by_system.add(s.system_id, "correctness", item.verdict.verdict == Verdict::correct ? 1.0 : 0.0);
    }
    report.results["sentences"] = sentences;
    report.results["systems"] = by_system.to_json();
    by_system.append_summary(report.summary);
    if (cm.total() > 0) {
        report.results["agreement"] = {{"classes", cm.classes},
                                       {"confusion", cm.counts},
                                       {"macro", prf_json(stats::prf(cm, stats::Averaging::macro))},
                                       {"weighted", prf_json(stats::prf(cm, stats::Averaging::weighted))}};
    }
}

void simnli(const EvalContext& ctx, const CorrectnessOptions& options, stats::EvalReport& report) {
    correctness::SimNliOptions o;
    o.seed = ctx.seed;
    o.fragments = options.fragments;
    o.negative = options.negative;
    o.workers = ctx.workers;
    const auto r = correctness::run_sim_nli_analysis(ctx.corpus, ctx.gateway,
                                                     ctx.config.endpoint(gateway::Capability::embed),
                                                     ctx.config.endpoint(gateway::Capability::nli), o);
    json questions = json::array();
    for (const auto& q : r.questions) {
        questions.push_back(
            {{"question_id", q.question_id}, {"document", scores_json(q.document)}, {"evidence", scores_json(q.evidence)}});
    }
    report.results["negative"] =
        options.negative == correctness::NegativeReading::sampled_documents ? "sampled_documents" : "sampled_sentence";
    report.results["questions"] = questions;
    report.results["overall"] = {{"document", scores_json(r.overall_document)},
                                 {"evidence", scores_json(r.overall_evidence)}};
    for (const auto& [variant, s] : {std::pair{"document", r.overall_document}, std::pair{"evidence", r.overall_evidence}}) {
        const std::string v = variant;
        report.summary.push_back({"all", v + "_accuracy_sim", s.accuracy_sim});
        report.summary.push_back({"all", v + "_accuracy_nli", s.accuracy_nli});
        report.summary.push_back({"all", v + "_auc_sim", s.auc_sim});
        report.summary.push_back({"all", v + "_auc_nli", s.auc_nli});
    }
}

void topk(const EvalContext& ctx, const CorrectnessOptions& options, stats::EvalReport& report) {
    auto judge = make_judge(ctx, options.judge, options.judge_threshold);
    retrieval::InvertedIndex index;
    if (options.index) {
        index = *options.index;
    } else {
        std::vector<retrieval::IndexUnit> units;
        for (const auto& d : ctx.corpus.documents) units.push_back({d.pmid, d.reference_text()});
        index = retrieval::build_index(units);
    }
    auto topk_options = options.topk;
    topk_options.fragments = options.fragments;
    topk_options.workers = ctx.workers;
    const auto& rerank = ctx.config.endpoint(gateway::Capability::rerank);

    std::map<std::string, std::vector<const core::Document*>> rankings;
    json answers = json::array();
    std::map<std::string, std::map<std::size_t, std::pair<double, double>>> by_system;
    for (const auto* a : detail::sorted_answers(ctx.corpus)) {
        if (a->sentences.empty()) continue;
        auto& ranking = rankings[a->question_id];
        if (ranking.empty()) {
            const auto* q = ctx.corpus.find_question(a->question_id);
            for (const auto& pmid : correctness::retrieve_and_rerank(*q, index, ctx.corpus, ctx.gateway, rerank, topk_options))
                ranking.push_back(ctx.corpus.find_document(pmid));
        }
        std::vector<const core::AnswerSentence*> sentences;
        for (const auto& s : a->sentences) sentences.push_back(&s);
        const auto at_k = correctness::correctness_at_k_ranked(sentences, ranking, *judge, topk_options);
        json curve = json::object();
        for (const auto& [k, v] : at_k) {
            curve[std::to_string(k)] = stats::real(v);
            auto& cell = by_system[a->system_id][k];
            cell.first += v;
            cell.second += 1;
        }
        answers.push_back({{"question_id", a->question_id}, {"system_id", a->system_id}, {"correctness_at_k", curve}});
    }
    report.results["answers"] = answers;
    json systems = json::object();
    for (const auto& [system, curve] : by_system) {
        for (const auto& [k, cell] : curve) {
            const double mean = cell.first / cell.second;
            systems[system][std::to_string(k)] = stats::real(mean);
            report.plot.push_back({"correctness_at_k", k, system, mean});
            report.summary.push_back({system, "correctness_at_" + std::to_string(k), mean});
        }
    }
    report.results["systems"] = systems;
}

}  // namespace

stats::EvalReport eval_correctness(const EvalContext& ctx, const CorrectnessOptions& options) {
    stats::EvalReport report;
    report.results["task"] = "correctness";
    static const char* modes[] = {"classify", "simnli", "topk"};
    report.results["mode"] = modes[static_cast<int>(options.mode)];
    report.results["window"] = options.fragments.window;
    report.results["stride"] = options.fragments.stride;
    switch (options.mode) {
        case CorrectnessMode::classify: classify(ctx, options, report); break;
        case CorrectnessMode::simnli: simnli(ctx, options, report); break;
        case CorrectnessMode::topk: topk(ctx, options, report); break;
    }
    return report;
}

}  // namespace bioace::pipeline
