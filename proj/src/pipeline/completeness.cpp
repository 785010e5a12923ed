#include "bioace/completeness/completeness.hpp"
#include "bioace/error.hpp"
#include "bioace/pipeline/pipelines.hpp"
#include "common.hpp"

namespace bioace::pipeline {

using nlohmann::json;

stats::EvalReport eval_completeness(const EvalContext& ctx) {
    const auto& generate = ctx.config.endpoint(gateway::Capability::generate);
    stats::EvalReport report;
    report.results["task"] = "completeness";
    report.results["generate_model"] = generate.model_id;

    json answers = json::array();
    detail::MeanTable by_system;
    std::map<std::string, core::RelevanceLabel> predicted_with_gold, gold;
    for (const auto* a : detail::sorted_answers(ctx.corpus)) {
        if (a->sentences.empty()) continue;
        const auto* q = ctx.corpus.find_question(a->question_id);
        const auto r = completeness::evaluate_answer(*q, *a, ctx.gateway, generate, ctx.workers);
        json labels = json::object();
        for (const auto& [id, label] : r.per_sentence) labels[id] = core::to_string(label);
        json counts = json::object();
        for (std::size_t i = 0; i < core::kRelevanceLabelCount; ++i)
            counts[std::string(core::to_string(static_cast<core::RelevanceLabel>(i)))] = r.metrics.counts[i];
        answers.push_back({{"question_id", a->question_id},
                           {"system_id", a->system_id},
                           {"labels", labels},
                           {"counts", counts},
                           {"completeness", stats::real(r.metrics.completeness)},
                           {"redundancy", stats::real(r.metrics.redundancy)},
                           {"harmfulness", stats::real(r.metrics.harmfulness)}});
        by_system.add(a->system_id, "completeness", r.metrics.completeness);
        by_system.add(a->system_id, "redundancy", r.metrics.redundancy);
        by_system.add(a->system_id, "harmfulness", r.metrics.harmfulness);
        for (const auto& s : a->sentences) {
            if (!s.gold_relevance) continue;
            gold[s.id] = *s.gold_relevance;
            predicted_with_gold[s.id] = r.per_sentence.at(s.id);
        }
    }
    if (answers.empty()) fail(ErrorKind::EmptyAnswer, "corpus has no answer sentences");
    report.results["answers"] = answers;
    report.results["systems"] = by_system.to_json();
    by_system.append_summary(report.summary);

    if (!gold.empty()) {
        const auto cm = completeness::relevance_confusion(predicted_with_gold, gold);
        const auto w = stats::prf(cm, stats::Averaging::weighted);
        report.results["agreement"] = {{"sentences", gold.size()},
                                       {"classes", cm.classes},
                                       {"confusion", cm.counts},
                                       {"weighted", {{"precision", stats::real(w.precision)},
                                                     {"recall", stats::real(w.recall)},
                                                     {"f1", stats::real(w.f1)}}}};
    }
    return report;
}

}  // namespace bioace::pipeline
