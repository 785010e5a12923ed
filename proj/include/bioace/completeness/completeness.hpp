#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bioace/core/types.hpp"
#include "bioace/gateway/gateway.hpp"
#include "bioace/stats/stats.hpp"

namespace bioace::completeness {

std::string completeness_prompt(std::string_view question, std::string_view answer_sentence);

/// Required / Unnecessary / Borderline / Inappropriate.
const gateway::LabelSet& relevance_labels();

/// Throws UnparsableLabelError naming the sentence id.
core::RelevanceLabel label_sentence(const core::Question& question, const core::AnswerSentence& sentence,
                                    gateway::ModelGateway& gateway, const gateway::EndpointConfig& endpoint);

struct RelevanceMetrics {
    double completeness = 0.0;  ///< #Required / n
    double redundancy = 0.0;    ///< #Unnecessary / n
    double harmfulness = 0.0;   ///< #Inappropriate / n
    std::array<std::size_t, core::kRelevanceLabelCount> counts{};
};

/// Throws EmptyAnswer on an empty label list.
RelevanceMetrics compute_relevance_metrics(const std::vector<core::RelevanceLabel>& labels);

struct CompletenessReport {
    std::string question_id;
    std::string system_id;
    std::map<std::string, core::RelevanceLabel> per_sentence;
    RelevanceMetrics metrics;
};

/// Labels every sentence of the answer, up to `workers` at a time.
CompletenessReport evaluate_answer(const core::Question& question, const core::Answer& answer,
                                   gateway::ModelGateway& gateway, const gateway::EndpointConfig& endpoint,
                                   std::size_t workers = 1);

stats::ConfusionMatrix relevance_confusion(const std::map<std::string, core::RelevanceLabel>& predicted,
                                           const std::map<std::string, core::RelevanceLabel>& gold);

/// Weighted 4-class P/R/F1. Throws KeyMismatch unless both maps share a key set.
stats::Prf evaluate_labels_vs_gold(const std::map<std::string, core::RelevanceLabel>& predicted,
                                   const std::map<std::string, core::RelevanceLabel>& gold);

}  // namespace bioace::completeness
