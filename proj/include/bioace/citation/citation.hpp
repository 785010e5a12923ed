#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bioace/core/types.hpp"
#include "bioace/gateway/gateway.hpp"
#include "bioace/stats/stats.hpp"

namespace bioace::citation {

enum class BinaryLabel { attributable, not_attributable };
enum class TernaryLabel { support, contradict, neutral };
enum class QuaternaryLabel { supports, contradicts, neutral, not_relevant };

std::string_view to_string(BinaryLabel l);
std::string_view to_string(TernaryLabel l);
std::string_view to_string(QuaternaryLabel l);

const gateway::LabelSet& binary_labels();
const gateway::LabelSet& ternary_labels();
const gateway::LabelSet& quaternary_labels();

std::optional<BinaryLabel> parse_binary(std::string_view raw);
std::optional<TernaryLabel> parse_ternary(std::string_view raw);
std::optional<QuaternaryLabel> parse_quaternary(std::string_view raw);

TernaryLabel to_ternary(QuaternaryLabel l);  ///< not_relevant -> neutral
BinaryLabel to_binary(TernaryLabel l);       ///< support -> attributable, else not_attributable
BinaryLabel to_binary(QuaternaryLabel l);
QuaternaryLabel from_gold(core::CitationLabel l);

enum class Scheme { binary, ternary };

/// Canonical class names of a scheme, in enum order.
std::vector<std::string> scheme_classes(Scheme scheme);
/// Gold judgment expressed in the scheme (supporting -> attributable; not_relevant -> neutral).
std::string gold_label(core::CitationLabel gold, Scheme scheme);
/// Any quaternary judgment expressed in the scheme.
std::string scheme_label(QuaternaryLabel label, Scheme scheme);
/// Scheme class back to the four-way vocabulary used by the system metrics
/// (attributable -> supports, not attributable -> neutral).
QuaternaryLabel from_scheme_label(std::string_view label, Scheme scheme);

std::string binary_prompt(std::string_view claim, std::string_view reference);
std::string ternary_prompt(std::string_view claim, std::string_view reference);
std::string nugget_list_prompt(const std::vector<std::string>& answer_nuggets,
                               const std::vector<std::string>& document_nuggets);

/// Setting A: the claim against the title + abstract. Returns a class of `scheme`.
std::string judge_sentence_document(std::string_view sentence, const core::Document& doc, Scheme scheme,
                                    gateway::ModelGateway& gateway, const gateway::EndpointConfig& generate);

/// Judges a claim against an arbitrary reference text.
std::string judge_claim(std::string_view claim, std::string_view reference, Scheme scheme,
                        gateway::ModelGateway& gateway, const gateway::EndpointConfig& generate);

struct MaxSimSentence {
    std::string pmid;
    std::size_t sentence_index = 0;
    std::string text;
    double similarity = 0.0;
};

/// The document sentence closest to the answer sentence; ties go to the
/// smallest index. Throws EmptyDocument for an unsegmented document.
MaxSimSentence max_sim_sentence(std::string_view sentence, const core::Document& doc, gateway::ModelGateway& gateway,
                                const gateway::EndpointConfig& embed);

/// Setting C: one label for the two nugget lists. Throws EmptyNuggetList.
QuaternaryLabel judge_nugget_lists(const std::vector<std::string>& answer_nuggets,
                                   const std::vector<std::string>& document_nuggets, gateway::ModelGateway& gateway,
                                   const gateway::EndpointConfig& generate);

/// grid[i][j] is the label of (answer nugget i, document nugget j).
/// Strict: contradicts if any pair contradicts; supports if every answer
/// nugget has a supporting document nugget; neutral if any pair is supports
/// or neutral; else not_relevant. Lenient: one supporting pair suffices.
QuaternaryLabel aggregate_pair_labels(const std::vector<std::vector<QuaternaryLabel>>& grid, bool lenient = false);

/// NLI argmax per pair (document nugget as premise): support -> supports,
/// refute -> contradicts, insufficient -> neutral.
std::vector<std::vector<QuaternaryLabel>> pairwise_nli_labels(const std::vector<std::string>& answer_nuggets,
                                                              const std::vector<std::string>& document_nuggets,
                                                              gateway::ModelGateway& gateway,
                                                              const gateway::EndpointConfig& nli);

struct ThresholdFit {
    double threshold = 0.0;
    double f1 = 0.0;
};

/// Candidates: -inf, midpoints of consecutive distinct scores, +inf. Predict
/// attributable iff score >= t; maximize the attributable-class F1, ties to
/// the smallest t. Throws DegenerateLabels without both classes.
ThresholdFit fit_score_threshold(std::span<const double> scores, const std::vector<bool>& attributable);

/// F1 of the attributable class at threshold t.
double attributable_f1(std::span<const double> scores, const std::vector<bool>& attributable, double t);

struct SystemCitationMetrics {
    double citation_coverage = 0.0;
    double citation_support_rate = 0.0;
    double citation_contradict_rate = 0.0;
    double citation_neutral_rate = 0.0;
    double citation_not_relevant_rate = 0.0;
    std::size_t sentences = 0;
    std::size_t citations = 0;
};

using PairKey = std::pair<std::string, std::string>;  ///< (sentence id, pmid)

/// coverage = sentences with at least one supporting citation / sentences;
/// rates = citations with that label / citations (0 without citations).
/// Throws PreconditionFailed when a citation has no label.
SystemCitationMetrics system_citation_metrics(const std::vector<const core::Answer*>& answers,
                                              const std::map<PairKey, QuaternaryLabel>& labels);

}  // namespace bioace::citation
