#include <algorithm>

#include "bioace/error.hpp"
#include "bioace/nugget/nuggetize.hpp"
#include "bioace/pipeline/pipelines.hpp"
#include "bioace/util/parallel.hpp"
#include "common.hpp"

namespace bioace::pipeline {

using nlohmann::json;

std::vector<std::string> system_nugget_texts(const EvalContext& ctx, const core::Answer& answer) {
    std::vector<std::string> out;
    for (const auto* n : ctx.corpus.system_nuggets(answer.question_id, answer.system_id)) out.push_back(n->text);
    if (!out.empty()) return out;
    return nugget::extract_nugget_texts(answer.text(), ctx.gateway, ctx.config.endpoint(gateway::Capability::generate));
}

std::vector<NuggetInstance> nugget_instances(const EvalContext& ctx, const NuggetEvalOptions& options) {
    std::vector<const core::Answer*> answers;
    for (const auto* a : detail::sorted_answers(ctx.corpus)) {
        if (!ctx.corpus.gold_nuggets(a->question_id).empty()) answers.push_back(a);
    }
    if (answers.empty()) fail(ErrorKind::EmptyInput, "no answer has gold nuggets to align against");
    std::vector<NuggetInstance> out(answers.size());
    const auto& embed = ctx.config.endpoint(gateway::Capability::embed);
    parallel_for_index(answers.size(), ctx.workers, [&](std::size_t i) {
        const auto* a = answers[i];
        std::vector<std::string> gold;
        for (const auto* n : ctx.corpus.gold_nuggets(a->question_id)) gold.push_back(n->text);
        auto& inst = out[i];
        inst.answer = a;
        inst.matrix = nugget::build_similarity_matrix(system_nugget_texts(ctx, *a), gold, ctx.gateway, embed);
        const auto samples = inst.matrix.flattened();
        if (samples.size() >= options.bgmm.min_samples) {
            auto config = options.bgmm;
            config.seed = ctx.seed;
            inst.model = nugget::fit_bgmm(samples, config);
        }
    });
    return out;
}

nugget::ThresholdSearchResult tune_nugget_threshold(const std::vector<NuggetInstance>& instances,
                                                    const NuggetEvalOptions& options) {
    std::vector<nugget::TuningInstance> train;
    const nugget::BgmmModel none;
    for (const auto& inst : instances) {
        train.push_back(nugget::make_tuning_instance(inst.matrix, inst.model ? *inst.model : none,
                                                     options.align.raw_cosine_fallback));
    }
    return nugget::tune_threshold(train, options.grid, options.weights);
}

namespace {

json model_json(const std::optional<nugget::BgmmModel>& model) {
    if (!model) return nullptr;
    json comps = json::array();
    for (const auto& c : model->components) {
        comps.push_back({{"weight", stats::real(c.weight)},
                         {"mean", stats::real(c.mean)},
                         {"variance", stats::real(c.variance)}});
    }
    return {{"components", comps},
            {"similar_component", model->similar_component},
            {"iterations", model->iterations},
            {"converged", model->converged},
            {"elbo", stats::real(model->elbo_trace.empty() ? 0.0 : model->elbo_trace.back())}};
}

json objectives_json(const nugget::ThresholdObjectives& o) {
    return {{"threshold", stats::real(o.threshold)},
            {"avg_f1", stats::real(o.avg_f1)},
            {"avg_similarity", stats::real(o.avg_similarity)},
            {"avg_alignments", stats::real(o.avg_alignments)},
            {"scalarized", stats::real(o.scalarized)}};
}

}  // namespace

stats::EvalReport eval_nuggets(const EvalContext& ctx, const NuggetEvalOptions& options) {
    const auto instances = nugget_instances(ctx, options);
    const auto& embed_model = ctx.config.endpoint(gateway::Capability::embed).model_id;

    stats::EvalReport report;
    auto& results = report.results;
    results["task"] = "nuggets";
    results["embed_model"] = embed_model;

    double threshold = 0.0;
    std::string source;
    if (options.threshold && !options.auto_threshold) {
        threshold = *options.threshold;
        source = "fixed";
    } else if (auto it = ctx.config.nugget_thresholds.find(embed_model);
               !options.auto_threshold && it != ctx.config.nugget_thresholds.end()) {
        threshold = it->second;
        source = "config";
    } else if (auto d = nugget::default_threshold_for(embed_model); !options.auto_threshold && d) {
        threshold = *d;
        source = "default";
    } else {
        const auto tuned = tune_nugget_threshold(instances, options);
        threshold = tuned.threshold;
        source = "tuned";
        results["tuning"] = objectives_json(tuned);
    }
    results["threshold"] = {{"value", stats::real(threshold)}, {"source", source}};

    json answers = json::array();
    detail::MeanTable by_system, by_question;
    for (const auto& inst : instances) {
        const auto alignment =
            nugget::align_nuggets(inst.matrix, inst.model ? &*inst.model : nullptr, threshold, options.align);
        const auto prf = nugget::score_prf(alignment, inst.matrix.n_sys(), inst.matrix.n_gold());
        json pairs = json::array();
        for (const auto& p : alignment.pairs) {
            pairs.push_back({{"sys", p.sys},
                             {"gold", p.gold},
                             {"probability", stats::real(p.probability)},
                             {"similarity", stats::real(p.similarity)}});
        }
        const auto& a = *inst.answer;
        answers.push_back({{"question_id", a.question_id},
                           {"system_id", a.system_id},
                           {"system_nuggets", inst.matrix.row_nuggets},
                           {"n_sys", inst.matrix.n_sys()},
                           {"n_gold", inst.matrix.n_gold()},
                           {"precision", stats::real(prf.precision)},
                           {"recall", stats::real(prf.recall)},
                           {"f1", stats::real(prf.f1)},
                           {"threshold_used", stats::real(alignment.threshold_used)},
                           {"fallback_used", alignment.fallback_used},
                           {"model", model_json(inst.model)},
                           {"alignments", pairs}});
        for (const auto& [table, key] : {std::pair{&by_system, a.system_id}, std::pair{&by_question, a.question_id}}) {
            table->add(key, "nugget_precision", prf.precision);
            table->add(key, "nugget_recall", prf.recall);
            table->add(key, "nugget_f1", prf.f1);
        }
    }
    results["answers"] = answers;
    results["systems"] = by_system.to_json();
    results["questions"] = by_question.to_json();
    by_system.append_summary(report.summary);
    return report;
}

std::vector<core::Nugget> prepare_nuggets(const EvalContext& ctx) {
    auto out = ctx.corpus.nuggets;
    const auto answers = detail::sorted_answers(ctx.corpus);
    std::vector<std::vector<std::string>> extracted(answers.size());
    parallel_for_index(answers.size(), ctx.workers, [&](std::size_t i) {
        if (ctx.corpus.system_nuggets(answers[i]->question_id, answers[i]->system_id).empty())
            extracted[i] = system_nugget_texts(ctx, *answers[i]);
    });
    for (std::size_t i = 0; i < answers.size(); ++i) {
        for (auto& text : extracted[i]) {
            core::Nugget n;
            n.text = std::move(text);
            n.origin = core::NuggetOrigin::system;
            n.question_id = answers[i]->question_id;
            n.system_id = answers[i]->system_id;
            out.push_back(std::move(n));
        }
    }
    return out;
}

}  // namespace bioace::pipeline
