#include "bioace/correctness/correctness.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bioace/citation/citation.hpp"
#include "bioace/error.hpp"
#include "bioace/kernels/kernels.hpp"
#include "bioace/util/text.hpp"

namespace bioace::correctness {

std::vector<DocumentFragment> fragment_document(const core::Document& doc, std::size_t window, std::size_t stride) {
    if (window == 0 || stride == 0) fail(ErrorKind::PreconditionFailed, "window and stride must be positive");
    std::vector<DocumentFragment> out;
    const auto n = doc.sentences.size();
    if (n == 0) return out;
    if (n < window) {
        out.push_back({doc.pmid, 0, doc.sentences, text::join(doc.sentences, " ")});
        return out;
    }
    for (std::size_t start = 0; start < n; start += stride) {
        const auto len = std::min(window, n - start);
        std::vector<std::string> sentences(doc.sentences.begin() + static_cast<std::ptrdiff_t>(start),
                                           doc.sentences.begin() + static_cast<std::ptrdiff_t>(start + len));
        auto joined = text::join(sentences, " ");
        out.push_back({doc.pmid, start, std::move(sentences), std::move(joined)});
    }
    return out;
}

std::string span_text(const core::Document& doc, std::size_t start, std::size_t end) {
    if (start > end || end >= doc.sentences.size())
        fail(ErrorKind::PreconditionFailed, "span " + std::to_string(start) + ".." + std::to_string(end) +
                                                " is outside document " + doc.pmid);
    std::vector<std::string> parts(doc.sentences.begin() + static_cast<std::ptrdiff_t>(start),
                                   doc.sentences.begin() + static_cast<std::ptrdiff_t>(end + 1));
    return text::join(parts, " ");
}

GenerationJudge::GenerationJudge(gateway::ModelGateway& gateway, gateway::EndpointConfig endpoint)
    : gateway_(gateway), endpoint_(std::move(endpoint)) {}

bool GenerationJudge::is_correct(const std::string& sentence, const DocumentFragment& fragment) {
    return citation::judge_claim(sentence, fragment.text, citation::Scheme::binary, gateway_, endpoint_) ==
           "attributable";
}

NliJudge::NliJudge(gateway::ModelGateway& gateway, gateway::EndpointConfig endpoint, double threshold)
    : gateway_(gateway), endpoint_(std::move(endpoint)), threshold_(threshold) {}

bool NliJudge::is_correct(const std::string& sentence, const DocumentFragment& fragment) {
    return gateway_.nli(fragment.text, sentence, endpoint_).p_support >= threshold_;
}

CosineJudge::CosineJudge(gateway::ModelGateway& gateway, gateway::EndpointConfig endpoint, double threshold)
    : gateway_(gateway), endpoint_(std::move(endpoint)), threshold_(threshold) {}

bool CosineJudge::is_correct(const std::string& sentence, const DocumentFragment& fragment) {
    const auto v = gateway_.embed_batch({sentence, fragment.text}, endpoint_);
    return kernels::cosine(v[0].values, v[1].values) >= threshold_;
}

CorrectnessVerdict judge_sentence(const core::AnswerSentence& sentence, const std::vector<const core::Document*>& docs,
                                  FragmentJudge& judge, const FragmentOptions& options, bool short_circuit) {
    if (docs.empty()) fail(ErrorKind::PreconditionFailed, "sentence " + sentence.id + " has no documents to judge");
    CorrectnessVerdict out{sentence.id, Verdict::incorrect, std::nullopt};
    for (const auto* doc : docs) {
        for (const auto& fragment : fragment_document(*doc, options.window, options.stride)) {
            bool correct = false;
            try {
                correct = judge.is_correct(sentence.text, fragment);
            } catch (const UnparsableLabelError& e) {
                throw UnparsableLabelError(e.raw_output(), "sentence " + sentence.id + ", fragment " + doc->pmid +
                                                               "#" + std::to_string(fragment.start_sentence));
            } catch (const Error& e) {
                throw Error(e.kind(), e.message() + " (sentence " + sentence.id + ", document " +
                                          doc->pmid + ")");
            }
            if (correct && !out.deciding_fragment) {
                out.verdict = Verdict::correct;
                out.deciding_fragment = FragmentRef{doc->pmid, fragment.start_sentence};
                if (short_circuit) return out;
            }
        }
    }
    return out;
}

FragmentIndex build_fragment_index(const std::vector<core::Document>& documents, const FragmentOptions& options) {
    FragmentIndex out;
    std::vector<retrieval::IndexUnit> units;
    for (const auto& doc : documents) {
        for (auto& f : fragment_document(doc, options.window, options.stride)) {
            units.push_back({f.pmid + "#" + std::to_string(f.start_sentence), f.text});
            out.fragments.push_back(std::move(f));
        }
    }
    out.index = retrieval::build_index(units);
    return out;
}

std::vector<TrainingPair> build_training_pairs(const core::Corpus& corpus, const FragmentIndex& fragments,
                                               const retrieval::Bm25Params& params) {
    std::map<core::DocumentId, std::vector<core::EvidenceSpan>> spans_by_doc;
    for (const auto& answer : corpus.answers) {
        for (const auto& s : answer.sentences) {
            if (!s.gold_evidence) continue;
            for (const auto& span : *s.gold_evidence) spans_by_doc[span.pmid].push_back(span);
        }
    }

    std::vector<TrainingPair> out;
    for (const auto& answer : corpus.answers) {
        const auto* question = corpus.find_question(answer.question_id);
        for (const auto& s : answer.sentences) {
            if (!s.gold_evidence || s.gold_evidence->empty()) continue;
            std::vector<core::DocumentId> evidence_docs;
            for (const auto& span : *s.gold_evidence) {
                const auto* doc = corpus.find_document(span.pmid);
                if (!doc) fail(ErrorKind::DanglingReference, "evidence cites unknown document " + span.pmid);
                out.push_back({s.id, s.text, span_text(*doc, span.start_sentence, span.end_sentence), span.pmid,
                               span.start_sentence, span.end_sentence, PairLabel::correct,
                               PairProvenance::annotated_span});
                if (std::find(evidence_docs.begin(), evidence_docs.end(), span.pmid) == evidence_docs.end())
                    evidence_docs.push_back(span.pmid);
            }

            const auto scores = retrieval::bm25_scores(question->text, fragments.index, params);
            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i < fragments.fragments.size(); ++i) {
                const auto& pmid = fragments.fragments[i].pmid;
                if (std::find(evidence_docs.begin(), evidence_docs.end(), pmid) != evidence_docs.end())
                    candidates.push_back(i);
            }
            std::stable_sort(candidates.begin(), candidates.end(),
                             [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
            bool found = false;
            for (auto i : candidates) {
                const auto& f = fragments.fragments[i];
                const auto& spans = spans_by_doc[f.pmid];
                const bool overlaps = std::any_of(spans.begin(), spans.end(), [&](const core::EvidenceSpan& sp) {
                    return f.overlaps(sp.start_sentence, sp.end_sentence);
                });
                if (overlaps) continue;
                out.push_back({s.id, s.text, f.text, f.pmid, f.start_sentence, f.end_sentence(), PairLabel::incorrect,
                               PairProvenance::bm25_negative});
                found = true;
                break;
            }
            if (!found)
                fail(ErrorKind::NoNegativeAvailable,
                     "every fragment of the evidence documents of sentence " + s.id + " overlaps an annotated span");
        }
    }
    return out;
}

}  // namespace bioace::correctness
