#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bioace/citation/citation.hpp"
#include "bioace/core/types.hpp"
#include "bioace/correctness/correctness.hpp"
#include "bioace/gateway/config.hpp"
#include "bioace/gateway/gateway.hpp"
#include "bioace/nugget/alignment.hpp"
#include "bioace/nugget/bgmm.hpp"
#include "bioace/nugget/threshold.hpp"
#include "bioace/retrieval/bm25.hpp"
#include "bioace/stats/report.hpp"

namespace bioace::pipeline {

/// Everything a corpus-level evaluation needs.
struct EvalContext {
    const core::Corpus& corpus;
    gateway::ModelGateway& gateway;
    const gateway::GatewayConfig& config;
    std::uint64_t seed = 13;
    std::size_t workers = 4;
};

// ---- nuggets ----

struct NuggetEvalOptions {
    /// Fixed probability threshold; nullopt uses the configured or shipped
    /// default of the embedding model, or tunes when there is none.
    std::optional<double> threshold;
    bool auto_threshold = false;
    nugget::BgmmConfig bgmm{};
    nugget::AlignOptions align{};
    nugget::ThresholdGrid grid{};
    nugget::ObjectiveWeights weights{};
};

/// System nuggets of each answer: the corpus's own, or extracted through the
/// generation endpoint when the corpus has none for that answer.
std::vector<std::string> system_nugget_texts(const EvalContext& ctx, const core::Answer& answer);

struct NuggetInstance {
    const core::Answer* answer = nullptr;
    nugget::SimilarityMatrix matrix;
    std::optional<nugget::BgmmModel> model;  ///< empty when too few samples
};

/// One instance per answer whose question has gold nuggets.
std::vector<NuggetInstance> nugget_instances(const EvalContext& ctx, const NuggetEvalOptions& options);

nugget::ThresholdSearchResult tune_nugget_threshold(const std::vector<NuggetInstance>& instances,
                                                    const NuggetEvalOptions& options);

stats::EvalReport eval_nuggets(const EvalContext& ctx, const NuggetEvalOptions& options = {});

/// Corpus nuggets plus extracted system nuggets for every answer lacking them.
std::vector<core::Nugget> prepare_nuggets(const EvalContext& ctx);

// ---- completeness ----

stats::EvalReport eval_completeness(const EvalContext& ctx);

// ---- correctness ----

enum class CorrectnessMode { classify, simnli, topk };
enum class JudgeKind { gen, nli, cosine };

struct CorrectnessOptions {
    CorrectnessMode mode = CorrectnessMode::classify;
    JudgeKind judge = JudgeKind::gen;
    double judge_threshold = 0.75;
    correctness::FragmentOptions fragments{};
    bool supported_only = false;        ///< judge only gold-supporting documents
    bool deterministic_deciding = false;
    correctness::NegativeReading negative = correctness::NegativeReading::sampled_documents;
    correctness::TopKOptions topk{};
    /// Prebuilt document index for topk; built from the corpus when absent.
    std::optional<retrieval::InvertedIndex> index;
};

std::unique_ptr<correctness::FragmentJudge> make_judge(const EvalContext& ctx, JudgeKind kind, double threshold);

stats::EvalReport eval_correctness(const EvalContext& ctx, const CorrectnessOptions& options = {});

// ---- citations ----

enum class CitationSetting { doc, maxsim, nuggets };
enum class CitationJudge { gen, score, pairwise_oracle };

struct CitationOptions {
    CitationSetting setting = CitationSetting::doc;
    citation::Scheme scheme = citation::Scheme::binary;
    CitationJudge judge = CitationJudge::gen;
    std::optional<double> score_threshold;
    bool lenient_supports = false;
};

/// (claim, reference, attributable) examples for score-threshold fitting.
struct ScoreExample {
    std::string claim;
    std::string reference;
    bool attributable = false;
};

std::vector<ScoreExample> load_score_examples(const std::filesystem::path& path);
citation::ThresholdFit fit_score_threshold(const EvalContext& ctx, const std::vector<ScoreExample>& train);

stats::EvalReport eval_citations(const EvalContext& ctx, const CitationOptions& options = {});

}  // namespace bioace::pipeline
