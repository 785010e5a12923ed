#include <fstream>

#include "bioace/error.hpp"
#include "bioace/nugget/nuggetize.hpp"
#include "bioace/pipeline/pipelines.hpp"
#include "bioace/util/parallel.hpp"
#include "bioace/util/text.hpp"
#include "common.hpp"

namespace bioace::pipeline {

using nlohmann::json;
using citation::QuaternaryLabel;

std::vector<ScoreExample> load_score_examples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<ScoreExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw MalformedRecordError(path.string(), line_no, "", e.what());
        }
        const auto str = [&](const char* field) {
            if (!j.is_object() || !j.contains(field) || !j[field].is_string())
                throw MalformedRecordError(path.string(), line_no, field, "missing or not a string");
            return j[field].get<std::string>();
        };
        ScoreExample ex{str("claim"), str("reference"), false};
        const auto label = str("label");
        if (auto b = citation::parse_binary(label)) {
            ex.attributable = *b == citation::BinaryLabel::attributable;
        } else if (auto g = core::parse_citation_label(label)) {
            ex.attributable = *g == core::CitationLabel::supporting;
        } else {
            throw MalformedRecordError(path.string(), line_no, "label", "unknown label '" + label + "'");
        }
        out.push_back(std::move(ex));
    }
    return out;
}

citation::ThresholdFit fit_score_threshold(const EvalContext& ctx, const std::vector<ScoreExample>& train) {
    const auto& score = ctx.config.endpoint(gateway::Capability::score);
    std::vector<double> scores(train.size());
    std::vector<bool> gold(train.size());
    parallel_for_index(train.size(), ctx.workers, [&](std::size_t i) {
        scores[i] = ctx.gateway.score_pair(train[i].claim, train[i].reference, score);
    });
    for (std::size_t i = 0; i < train.size(); ++i) gold[i] = train[i].attributable;
    return citation::fit_score_threshold(scores, gold);
}

namespace {

struct Pair {
    const core::AnswerSentence* sentence = nullptr;
    const core::Document* doc = nullptr;
    std::string label;
    QuaternaryLabel four_way = QuaternaryLabel::neutral;
    json detail = json::object();
};

json prf_json(const stats::Prf& p) {
    return {{"precision", stats::real(p.precision)}, {"recall", stats::real(p.recall)}, {"f1", stats::real(p.f1)}};
}

}  // namespace

stats::EvalReport eval_citations(const EvalContext& ctx, const CitationOptions& options) {
    const auto scheme = options.scheme;
    if (options.judge == CitationJudge::score) {
        if (scheme != citation::Scheme::binary)
            fail(ErrorKind::PreconditionFailed, "a score judge only produces binary labels");
        if (!options.score_threshold) fail(ErrorKind::PreconditionFailed, "the score judge needs a threshold");
        if (options.setting == CitationSetting::nuggets)
            fail(ErrorKind::PreconditionFailed, "the nuggets setting takes the gen or pairwise-oracle judge");
    }
    if (options.judge == CitationJudge::pairwise_oracle && options.setting != CitationSetting::nuggets)
        fail(ErrorKind::PreconditionFailed, "the pairwise-oracle judge applies to the nuggets setting only");

    const auto& generate = ctx.config.endpoint(gateway::Capability::generate);
    const auto& embed = ctx.config.endpoint(gateway::Capability::embed);

    std::vector<Pair> pairs;
    const auto answers = detail::sorted_answers(ctx.corpus);
    for (const auto* a : answers) {
        for (const auto& s : a->sentences) {
            for (const auto& pmid : s.citations) {
                const auto* doc = ctx.corpus.find_document(pmid);
                if (!doc) fail(ErrorKind::DanglingReference, "sentence " + s.id + " cites unknown document " + pmid);
                pairs.push_back({&s, doc, {}, QuaternaryLabel::neutral, json::object()});
            }
        }
    }

    parallel_for_index(pairs.size(), ctx.workers, [&](std::size_t i) {
        auto& p = pairs[i];
        const auto& claim = p.sentence->text;
        if (options.setting == CitationSetting::nuggets) {
            const auto answer_nuggets = nugget::extract_nugget_texts(claim, ctx.gateway, generate);
            const auto doc_nuggets = nugget::extract_nugget_texts(p.doc->reference_text(), ctx.gateway, generate);
            p.detail["answer_nuggets"] = answer_nuggets;
            p.detail["document_nuggets"] = doc_nuggets;
            if (options.judge == CitationJudge::pairwise_oracle) {
                const auto grid = citation::pairwise_nli_labels(answer_nuggets, doc_nuggets, ctx.gateway,
                                                                ctx.config.endpoint(gateway::Capability::nli));
                p.four_way = citation::aggregate_pair_labels(grid, options.lenient_supports);
            } else {
                p.four_way = citation::judge_nugget_lists(answer_nuggets, doc_nuggets, ctx.gateway, generate);
            }
            p.detail["nugget_label"] = citation::to_string(p.four_way);
            p.label = citation::scheme_label(p.four_way, scheme);
            return;
        }
        std::string reference = p.doc->reference_text();
        if (options.setting == CitationSetting::maxsim) {
            const auto best = citation::max_sim_sentence(claim, *p.doc, ctx.gateway, embed);
            p.detail["max_sim_sentence"] = {{"index", best.sentence_index}, {"similarity", stats::real(best.similarity)}};
            reference = best.text;
        }
        if (options.judge == CitationJudge::score) {
            const double score = ctx.gateway.score_pair(claim, reference, ctx.config.endpoint(gateway::Capability::score));
            p.detail["score"] = stats::real(score);
            p.label = std::string(citation::to_string(score >= *options.score_threshold
                                                          ? citation::BinaryLabel::attributable
                                                          : citation::BinaryLabel::not_attributable));
        } else {
            p.label = citation::judge_claim(claim, reference, scheme, ctx.gateway, generate);
        }
        p.four_way = citation::from_scheme_label(p.label, scheme);
    });

    std::map<std::pair<std::string, std::string>, core::CitationLabel> gold;
    for (const auto& j : ctx.corpus.judgments) gold[{j.sentence_id, j.pmid}] = j.label;

    stats::ConfusionMatrix cm(citation::scheme_classes(scheme));
    json pair_rows = json::array();
    std::map<std::string, std::map<citation::PairKey, QuaternaryLabel>> labels_by_system;
    for (const auto& p : pairs) {
        json row{{"sentence_id", p.sentence->id},
                 {"system_id", p.sentence->system_id},
                 {"pmid", p.doc->pmid},
                 {"label", p.label}};
        if (auto it = gold.find({p.sentence->id, p.doc->pmid}); it != gold.end()) {
            const auto g = citation::gold_label(it->second, scheme);
            row["gold"] = g;
            cm.add(g, p.label);
        }
        for (const auto& [k, v] : p.detail.items()) row[k] = v;
        pair_rows.push_back(std::move(row));
        labels_by_system[p.sentence->system_id][{p.sentence->id, p.doc->pmid}] = p.four_way;
    }

    stats::EvalReport report;
    auto& results = report.results;
    static const char* settings[] = {"doc", "maxsim", "nuggets"};
    static const char* judges[] = {"gen", "score", "pairwise-oracle"};
    results["task"] = "citations";
    results["setting"] = settings[static_cast<int>(options.setting)];
    results["scheme"] = scheme == citation::Scheme::binary ? "binary" : "ternary";
    results["judge"] = judges[static_cast<int>(options.judge)];
    if (options.score_threshold) results["score_threshold"] = stats::real(*options.score_threshold);
    results["pairs"] = pair_rows;
    if (cm.total() > 0) {
        results["agreement"] = {{"classes", cm.classes},
                                {"confusion", cm.counts},
                                {"macro", prf_json(stats::prf(cm, stats::Averaging::macro))},
                                {"weighted", prf_json(stats::prf(cm, stats::Averaging::weighted))}};
    }

    std::map<std::string, std::vector<const core::Answer*>> answers_by_system;
    for (const auto* a : answers) answers_by_system[a->system_id].push_back(a);
    json systems = json::object();
    for (const auto& [system, system_answers] : answers_by_system) {
        const auto m = citation::system_citation_metrics(system_answers, labels_by_system[system]);
        const std::pair<const char*, double> metrics[] = {
            {"citation_coverage", m.citation_coverage},
            {"citation_support_rate", m.citation_support_rate},
            {"citation_contradict_rate", m.citation_contradict_rate},
            {"citation_neutral_rate", m.citation_neutral_rate},
            {"citation_not_relevant_rate", m.citation_not_relevant_rate},
        };
        auto& obj = systems[system] = {{"sentences", m.sentences}, {"citations", m.citations}};
        for (const auto& [name, value] : metrics) {
            obj[name] = stats::real(value);
            report.summary.push_back({system, name, value});
        }
    }
    results["systems"] = systems;
    return report;
}

}  // namespace bioace::pipeline
