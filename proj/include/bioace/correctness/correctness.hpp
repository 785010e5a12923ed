#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bioace/core/types.hpp"
#include "bioace/gateway/gateway.hpp"
#include "bioace/retrieval/bm25.hpp"

namespace bioace::correctness {

struct DocumentFragment {
    core::DocumentId pmid;
    std::size_t start_sentence = 0;
    std::vector<std::string> sentences;
    std::string text;

    std::size_t end_sentence() const { return start_sentence + sentences.size() - 1; }
    bool overlaps(std::size_t first, std::size_t last) const {
        return start_sentence <= last && first <= end_sentence();
    }
};

/// Fragments start at 0, stride, 2*stride, ... while start < sentence count and
/// take min(window, remaining) sentences. A document shorter than the window
/// yields one whole-document fragment.
std::vector<DocumentFragment> fragment_document(const core::Document& doc, std::size_t window = 3,
                                                std::size_t stride = 1);

/// Sentences start..end (inclusive) of doc joined by spaces.
std::string span_text(const core::Document& doc, std::size_t start, std::size_t end);

/// Fragment-level correctness oracle.
class FragmentJudge {
public:
    virtual ~FragmentJudge() = default;
    virtual bool is_correct(const std::string& sentence, const DocumentFragment& fragment) = 0;
};

/// Constrained-label generation judge (binary attribution prompt; attributable = correct).
class GenerationJudge final : public FragmentJudge {
public:
    GenerationJudge(gateway::ModelGateway& gateway, gateway::EndpointConfig endpoint);
    bool is_correct(const std::string& sentence, const DocumentFragment& fragment) override;

private:
    gateway::ModelGateway& gateway_;
    gateway::EndpointConfig endpoint_;
};

/// Correct iff NLI p_support(fragment => sentence) >= threshold.
class NliJudge final : public FragmentJudge {
public:
    NliJudge(gateway::ModelGateway& gateway, gateway::EndpointConfig endpoint, double threshold = 0.75);
    bool is_correct(const std::string& sentence, const DocumentFragment& fragment) override;

private:
    gateway::ModelGateway& gateway_;
    gateway::EndpointConfig endpoint_;
    double threshold_;
};

/// Correct iff cosine(embed(sentence), embed(fragment)) >= threshold.
class CosineJudge final : public FragmentJudge {
public:
    CosineJudge(gateway::ModelGateway& gateway, gateway::EndpointConfig endpoint, double threshold = 0.75);
    bool is_correct(const std::string& sentence, const DocumentFragment& fragment) override;

private:
    gateway::ModelGateway& gateway_;
    gateway::EndpointConfig endpoint_;
    double threshold_;
};

class FunctionJudge final : public FragmentJudge {
public:
    using Fn = std::function<bool(const std::string&, const DocumentFragment&)>;
    explicit FunctionJudge(Fn fn) : fn_(std::move(fn)) {}
    bool is_correct(const std::string& sentence, const DocumentFragment& fragment) override {
        return fn_(sentence, fragment);
    }

private:
    Fn fn_;
};

enum class Verdict { correct, incorrect };

struct FragmentRef {
    core::DocumentId pmid;
    std::size_t start_sentence = 0;
    bool operator==(const FragmentRef&) const = default;
};

struct CorrectnessVerdict {
    std::string sentence_id;
    Verdict verdict = Verdict::incorrect;
    std::optional<FragmentRef> deciding_fragment;
};

struct FragmentOptions {
    std::size_t window = 3;
    std::size_t stride = 1;
};

/// Correct iff any fragment of any document is judged correct; the deciding
/// fragment is the first correct one in (document, fragment) order. With
/// short_circuit = false every fragment is judged. Throws PreconditionFailed
/// when docs is empty.
CorrectnessVerdict judge_sentence(const core::AnswerSentence& sentence, const std::vector<const core::Document*>& docs,
                                  FragmentJudge& judge, const FragmentOptions& options = {},
                                  bool short_circuit = true);

enum class PairLabel { correct, incorrect };
enum class PairProvenance { annotated_span, bm25_negative };

struct TrainingPair {
    std::string sentence_id;
    std::string sentence;
    std::string fragment;
    core::DocumentId pmid;
    std::size_t start_sentence = 0;
    std::size_t end_sentence = 0;
    PairLabel label = PairLabel::correct;
    PairProvenance provenance = PairProvenance::annotated_span;
};

struct FragmentIndex {
    std::vector<DocumentFragment> fragments;
    retrieval::InvertedIndex index;  ///< unit i is fragments[i], label "pmid#start"
};

FragmentIndex build_fragment_index(const std::vector<core::Document>& documents, const FragmentOptions& options = {});

/// One positive per annotated span; one negative per sentence: the best BM25
/// fragment (query = question text) among the sentence's evidence documents
/// that shares no sentence with any annotated span of that document.
/// Throws NoNegativeAvailable when every candidate overlaps a span.
std::vector<TrainingPair> build_training_pairs(const core::Corpus& corpus, const FragmentIndex& fragments,
                                               const retrieval::Bm25Params& params = {});

/// Score summary of one question (or the whole run) for one variant.
struct SimNliScores {
    std::size_t pairs = 0;
    double avg_sim_pos = 0.0;
    double avg_sim_neg = 0.0;
    double avg_nli_pos = 0.0;
    double avg_nli_neg = 0.0;
    double accuracy_sim = 0.0;
    double accuracy_nli = 0.0;
    double auc_sim = 0.0;
    double auc_nli = 0.0;
};

/// Raw per-sentence scores of one variant.
struct SimNliSamples {
    std::vector<double> sim_pos, sim_neg, nli_pos, nli_neg;
};

SimNliScores summarize(const SimNliSamples& samples);

struct SimNliQuestion {
    std::string question_id;
    SimNliScores document;  ///< grouped supporting-document fragments
    SimNliScores evidence;  ///< annotated evidence spans
};

struct SimNliReport {
    std::vector<SimNliQuestion> questions;  ///< sorted by question id
    SimNliScores overall_document;          ///< pooled over all sentences
    SimNliScores overall_evidence;
};

enum class NegativeReading {
    sampled_documents,  ///< sampled row's first sentence supplies the documents, scored against the original sentence
    sampled_sentence,   ///< sampled row's first sentence is scored against the original documents
};

struct SimNliOptions {
    std::uint64_t seed = 13;
    FragmentOptions fragments{};
    NegativeReading negative = NegativeReading::sampled_documents;
    std::size_t workers = 1;
};

/// Algorithm-1 analysis. Sentences need gold supporting documents and
/// evidence; others are skipped. Throws MissingGold when none qualifies and
/// InsufficientQuestions with fewer than two qualifying questions.
SimNliReport run_sim_nli_analysis(const core::Corpus& corpus, gateway::ModelGateway& gateway,
                                  const gateway::EndpointConfig& embed, const gateway::EndpointConfig& nli,
                                  const SimNliOptions& options = {});

struct TopKOptions {
    std::size_t retrieve = 1000;
    std::vector<std::size_t> k_list{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    retrieval::Bm25Params bm25{};
    FragmentOptions fragments{};
    std::size_t workers = 1;
};

/// BM25 top-`retrieve` for the question, reranked through the gateway.
std::vector<core::DocumentId> retrieve_and_rerank(const core::Question& question, const retrieval::InvertedIndex& index,
                                                  const core::Corpus& corpus, gateway::ModelGateway& gateway,
                                                  const gateway::EndpointConfig& rerank, const TopKOptions& options);

/// Correctness@k over a fixed ranking: mean over sentences of "some document
/// among the first k holds a correct fragment". Throws EmptyAnswer without sentences.
std::map<std::size_t, double> correctness_at_k_ranked(const std::vector<const core::AnswerSentence*>& sentences,
                                                      const std::vector<const core::Document*>& ranking,
                                                      FragmentJudge& judge, const TopKOptions& options = {});

std::map<std::size_t, double> correctness_at_k(const core::Question& question,
                                               const std::vector<const core::AnswerSentence*>& sentences,
                                               const retrieval::InvertedIndex& index, const core::Corpus& corpus,
                                               gateway::ModelGateway& gateway, const gateway::EndpointConfig& rerank,
                                               FragmentJudge& judge, const TopKOptions& options = {});

}  // namespace bioace::correctness
