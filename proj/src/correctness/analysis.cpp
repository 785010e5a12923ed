#include <algorithm>
#include <numeric>
#include <random>

#include "bioace/correctness/correctness.hpp"
#include "bioace/error.hpp"
#include "bioace/kernels/kernels.hpp"
#include "bioace/stats/stats.hpp"
#include "bioace/util/parallel.hpp"

namespace bioace::correctness {

namespace {

bool has_gold(const core::AnswerSentence& s) {
    return s.gold_supporting_docs && !s.gold_supporting_docs->empty() && s.gold_evidence && !s.gold_evidence->empty();
}

struct Items {
    std::vector<std::string> documents;
    std::vector<std::string> evidence;
};

Items gold_items(const core::Corpus& corpus, const core::AnswerSentence& s, const FragmentOptions& options) {
    Items items;
    for (const auto& pmid : *s.gold_supporting_docs) {
        const auto* doc = corpus.find_document(pmid);
        if (!doc) fail(ErrorKind::DanglingReference, "sentence " + s.id + " cites unknown document " + pmid);
        for (const auto& f : fragment_document(*doc, options.window, options.stride)) items.documents.push_back(f.text);
    }
    for (const auto& span : *s.gold_evidence) {
        const auto* doc = corpus.find_document(span.pmid);
        if (!doc) fail(ErrorKind::DanglingReference, "evidence of " + s.id + " cites unknown document " + span.pmid);
        items.evidence.push_back(span_text(*doc, span.start_sentence, span.end_sentence));
    }
    if (items.documents.empty()) fail(ErrorKind::MissingGold, "supporting documents of " + s.id + " have no sentences");
    return items;
}

struct Scores {
    double sim = 0.0;
    double nli = 0.0;
};

/// Maximum cosine and maximum NLI support of the sentence over the items.
Scores best_scores(const std::string& sentence, const std::vector<std::string>& items, gateway::ModelGateway& gateway,
                   const gateway::EndpointConfig& embed, const gateway::EndpointConfig& nli) {
    std::vector<std::string> texts{sentence};
    texts.insert(texts.end(), items.begin(), items.end());
    const auto vectors = gateway.embed_batch(texts, embed);
    Scores out{-1.0, 0.0};
    for (std::size_t i = 0; i < items.size(); ++i) {
        out.sim = std::max(out.sim, kernels::cosine(vectors[0].values, vectors[i + 1].values));
        out.nli = std::max(out.nli, gateway.nli(items[i], sentence, nli).p_support);
    }
    return out;
}

struct Task {
    const core::AnswerSentence* sentence = nullptr;
    const core::AnswerSentence* negative = nullptr;  ///< first qualifying sentence of the sampled row
};

struct TaskResult {
    Scores doc_pos, doc_neg, ev_pos, ev_neg;
};

}  // namespace

SimNliScores summarize(const SimNliSamples& samples) {
    SimNliScores out;
    out.pairs = samples.sim_pos.size();
    if (out.pairs == 0) return out;
    const auto n = static_cast<double>(out.pairs);
    const auto mean = [&](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / n; };
    const auto accuracy = [&](const std::vector<double>& pos, const std::vector<double>& neg) {
        std::size_t wins = 0;
        for (std::size_t i = 0; i < pos.size(); ++i) wins += pos[i] > neg[i] ? 1 : 0;
        return static_cast<double>(wins) / n;
    };
    out.avg_sim_pos = mean(samples.sim_pos);
    out.avg_sim_neg = mean(samples.sim_neg);
    out.avg_nli_pos = mean(samples.nli_pos);
    out.avg_nli_neg = mean(samples.nli_neg);
    out.accuracy_sim = accuracy(samples.sim_pos, samples.sim_neg);
    out.accuracy_nli = accuracy(samples.nli_pos, samples.nli_neg);
    out.auc_sim = stats::auc(samples.sim_pos, samples.sim_neg);
    out.auc_nli = stats::auc(samples.nli_pos, samples.nli_neg);
    return out;
}

SimNliReport run_sim_nli_analysis(const core::Corpus& corpus, gateway::ModelGateway& gateway,
                                  const gateway::EndpointConfig& embed, const gateway::EndpointConfig& nli,
                                  const SimNliOptions& options) {
    // First qualifying sentence of each question's first qualifying answer.
    std::vector<std::string> question_ids;
    std::map<std::string, const core::AnswerSentence*> first_sentence;
    for (const auto& answer : corpus.answers) {
        if (first_sentence.count(answer.question_id)) continue;
        for (const auto& s : answer.sentences) {
            if (!has_gold(s)) continue;
            first_sentence[answer.question_id] = &s;
            question_ids.push_back(answer.question_id);
            break;
        }
    }
    if (question_ids.empty()) fail(ErrorKind::MissingGold, "no answer sentence carries supporting documents and evidence");
    if (question_ids.size() < 2)
        fail(ErrorKind::InsufficientQuestions, "negative sampling needs at least two questions with gold");

    std::mt19937_64 rng(options.seed);
    std::vector<Task> tasks;
    for (const auto& answer : corpus.answers) {
        const auto self = std::find(question_ids.begin(), question_ids.end(), answer.question_id);
        if (self == question_ids.end()) continue;
        const auto self_index = static_cast<std::size_t>(self - question_ids.begin());
        for (const auto& s : answer.sentences) {
            if (!has_gold(s)) continue;
            std::uniform_int_distribution<std::size_t> pick(0, question_ids.size() - 2);
            auto k = pick(rng);
            if (k >= self_index) ++k;
            tasks.push_back({&s, first_sentence.at(question_ids[k])});
        }
    }

    std::vector<TaskResult> results(tasks.size());
    parallel_for_index(tasks.size(), options.workers, [&](std::size_t i) {
        const auto& t = tasks[i];
        const auto pos_items = gold_items(corpus, *t.sentence, options.fragments);
        auto& r = results[i];
        r.doc_pos = best_scores(t.sentence->text, pos_items.documents, gateway, embed, nli);
        r.ev_pos = best_scores(t.sentence->text, pos_items.evidence, gateway, embed, nli);
        if (options.negative == NegativeReading::sampled_documents) {
            const auto neg_items = gold_items(corpus, *t.negative, options.fragments);
            r.doc_neg = best_scores(t.sentence->text, neg_items.documents, gateway, embed, nli);
            r.ev_neg = best_scores(t.sentence->text, neg_items.evidence, gateway, embed, nli);
        } else {
            r.doc_neg = best_scores(t.negative->text, pos_items.documents, gateway, embed, nli);
            r.ev_neg = best_scores(t.negative->text, pos_items.evidence, gateway, embed, nli);
        }
    });

    std::map<std::string, std::pair<SimNliSamples, SimNliSamples>> per_question;
    SimNliSamples all_doc, all_ev;
    const auto push = [](SimNliSamples& s, const Scores& pos, const Scores& neg) {
        s.sim_pos.push_back(pos.sim);
        s.sim_neg.push_back(neg.sim);
        s.nli_pos.push_back(pos.nli);
        s.nli_neg.push_back(neg.nli);
    };
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& [doc, ev] = per_question[tasks[i].sentence->question_id];
        push(doc, results[i].doc_pos, results[i].doc_neg);
        push(ev, results[i].ev_pos, results[i].ev_neg);
        push(all_doc, results[i].doc_pos, results[i].doc_neg);
        push(all_ev, results[i].ev_pos, results[i].ev_neg);
    }

    SimNliReport report;
    for (const auto& [qid, samples] : per_question)
        report.questions.push_back({qid, summarize(samples.first), summarize(samples.second)});
    report.overall_document = summarize(all_doc);
    report.overall_evidence = summarize(all_ev);
    return report;
}

std::vector<core::DocumentId> retrieve_and_rerank(const core::Question& question, const retrieval::InvertedIndex& index,
                                                  const core::Corpus& corpus, gateway::ModelGateway& gateway,
                                                  const gateway::EndpointConfig& rerank, const TopKOptions& options) {
    const auto top = retrieval::bm25_top_k(question.text, index, options.bm25, options.retrieve);
    std::vector<gateway::RerankCandidate> candidates;
    candidates.reserve(top.size());
    for (const auto& hit : top) {
        const auto& pmid = index.labels[hit.doc];
        const auto* doc = corpus.find_document(pmid);
        if (!doc) fail(ErrorKind::DanglingReference, "index refers to unknown document " + pmid);
        candidates.push_back({pmid, doc->reference_text()});
    }
    std::vector<core::DocumentId> out;
    for (const auto& r : gateway.rerank(question.text, candidates, rerank)) out.push_back(r.pmid);
    return out;
}

std::map<std::size_t, double> correctness_at_k_ranked(const std::vector<const core::AnswerSentence*>& sentences,
                                                      const std::vector<const core::Document*>& ranking,
                                                      FragmentJudge& judge, const TopKOptions& options) {
    if (sentences.empty()) fail(ErrorKind::EmptyAnswer, "Correctness@k needs at least one sentence");
    if (options.k_list.empty()) fail(ErrorKind::PreconditionFailed, "empty k list");
    const auto deepest = std::min(*std::max_element(options.k_list.begin(), options.k_list.end()), ranking.size());
    // Rank of the first document holding a correct fragment; `deepest` when none does.
    std::vector<std::size_t> first_correct(sentences.size(), deepest);
    parallel_for_index(sentences.size(), options.workers, [&](std::size_t i) {
        for (std::size_t r = 0; r < deepest; ++r) {
            const auto v = judge_sentence(*sentences[i], {ranking[r]}, judge, options.fragments);
            if (v.verdict == Verdict::correct) {
                first_correct[i] = r;
                return;
            }
        }
    });
    std::map<std::size_t, double> out;
    for (auto k : options.k_list) {
        std::size_t correct = 0;
        for (auto r : first_correct) correct += r < std::min(k, deepest) ? 1 : 0;
        out[k] = static_cast<double>(correct) / static_cast<double>(sentences.size());
    }
    return out;
}

std::map<std::size_t, double> correctness_at_k(const core::Question& question,
                                               const std::vector<const core::AnswerSentence*>& sentences,
                                               const retrieval::InvertedIndex& index, const core::Corpus& corpus,
                                               gateway::ModelGateway& gateway, const gateway::EndpointConfig& rerank,
                                               FragmentJudge& judge, const TopKOptions& options) {
    std::vector<const core::Document*> ranking;
    for (const auto& pmid : retrieve_and_rerank(question, index, corpus, gateway, rerank, options))
        ranking.push_back(corpus.find_document(pmid));
    return correctness_at_k_ranked(sentences, ranking, judge, options);
}

}  // namespace bioace::correctness
