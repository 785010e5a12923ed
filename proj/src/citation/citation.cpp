#include "bioace/citation/citation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bioace/error.hpp"
#include "bioace/kernels/kernels.hpp"

namespace bioace::citation {

std::string_view to_string(BinaryLabel l) {
    return l == BinaryLabel::attributable ? "attributable" : "not attributable";
}

std::string_view to_string(TernaryLabel l) {
    switch (l) {
        case TernaryLabel::support: return "support";
        case TernaryLabel::contradict: return "contradict";
        case TernaryLabel::neutral: return "neutral";
    }
    return "neutral";
}

std::string_view to_string(QuaternaryLabel l) {
    switch (l) {
        case QuaternaryLabel::supports: return "supports";
        case QuaternaryLabel::contradicts: return "contradicts";
        case QuaternaryLabel::neutral: return "neutral";
        case QuaternaryLabel::not_relevant: return "not relevant";
    }
    return "neutral";
}

const gateway::LabelSet& binary_labels() {
    static const gateway::LabelSet labels{{"attributable", {}}, {"not attributable", {}}};
    return labels;
}

const gateway::LabelSet& ternary_labels() {
    static const gateway::LabelSet labels{
        {"support", {"supports", "supporting", "supported"}},
        {"contradict", {"contradicts", "contradicting", "contradicted", "contradiction"}},
        {"neutral", {}},
    };
    return labels;
}

const gateway::LabelSet& quaternary_labels() {
    static const gateway::LabelSet labels{
        {"supports", {"support", "supporting", "supported"}},
        {"contradicts", {"contradict", "contradicting", "contradicted", "contradiction"}},
        {"neutral", {}},
        {"not relevant", {"irrelevant"}},
    };
    return labels;
}

std::optional<BinaryLabel> parse_binary(std::string_view raw) {
    const auto m = binary_labels().match(raw);
    if (!m) return std::nullopt;
    return *m == "attributable" ? BinaryLabel::attributable : BinaryLabel::not_attributable;
}

std::optional<TernaryLabel> parse_ternary(std::string_view raw) {
    const auto m = ternary_labels().match(raw);
    if (!m) return std::nullopt;
    if (*m == "support") return TernaryLabel::support;
    if (*m == "contradict") return TernaryLabel::contradict;
    return TernaryLabel::neutral;
}

std::optional<QuaternaryLabel> parse_quaternary(std::string_view raw) {
    const auto m = quaternary_labels().match(raw);
    if (!m) return std::nullopt;
    if (*m == "supports") return QuaternaryLabel::supports;
    if (*m == "contradicts") return QuaternaryLabel::contradicts;
    if (*m == "neutral") return QuaternaryLabel::neutral;
    return QuaternaryLabel::not_relevant;
}

TernaryLabel to_ternary(QuaternaryLabel l) {
    switch (l) {
        case QuaternaryLabel::supports: return TernaryLabel::support;
        case QuaternaryLabel::contradicts: return TernaryLabel::contradict;
        default: return TernaryLabel::neutral;
    }
}

BinaryLabel to_binary(TernaryLabel l) {
    return l == TernaryLabel::support ? BinaryLabel::attributable : BinaryLabel::not_attributable;
}

BinaryLabel to_binary(QuaternaryLabel l) { return to_binary(to_ternary(l)); }

QuaternaryLabel from_gold(core::CitationLabel l) {
    switch (l) {
        case core::CitationLabel::supporting: return QuaternaryLabel::supports;
        case core::CitationLabel::contradicting: return QuaternaryLabel::contradicts;
        case core::CitationLabel::neutral: return QuaternaryLabel::neutral;
        case core::CitationLabel::not_relevant: return QuaternaryLabel::not_relevant;
    }
    return QuaternaryLabel::neutral;
}

std::vector<std::string> scheme_classes(Scheme scheme) {
    if (scheme == Scheme::binary) return {"attributable", "not attributable"};
    return {"support", "contradict", "neutral"};
}

std::string scheme_label(QuaternaryLabel label, Scheme scheme) {
    if (scheme == Scheme::binary) return std::string(to_string(to_binary(label)));
    return std::string(to_string(to_ternary(label)));
}

std::string gold_label(core::CitationLabel gold, Scheme scheme) { return scheme_label(from_gold(gold), scheme); }

QuaternaryLabel from_scheme_label(std::string_view label, Scheme scheme) {
    if (scheme == Scheme::binary) {
        const auto b = parse_binary(label);
        if (!b) fail(ErrorKind::PreconditionFailed, "not a binary label: " + std::string(label));
        return *b == BinaryLabel::attributable ? QuaternaryLabel::supports : QuaternaryLabel::neutral;
    }
    const auto t = parse_ternary(label);
    if (!t) fail(ErrorKind::PreconditionFailed, "not a ternary label: " + std::string(label));
    switch (*t) {
        case TernaryLabel::support: return QuaternaryLabel::supports;
        case TernaryLabel::contradict: return QuaternaryLabel::contradicts;
        default: return QuaternaryLabel::neutral;
    }
}

namespace {

std::string attribution_prompt(std::string_view options, std::string_view claim, std::string_view reference) {
    std::string p = "### Instruction:\nPlease solely verify whether the reference can support the claim. Options: ";
    p += options;
    p += "\n\n### Input:\n\nClaim: ";
    p += claim;
    p += "\n\nReference: ";
    p += reference;
    p += "\n\n### Output:";
    return p;
}

std::string bullet_list(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        out += "\n- ";
        out += item;
    }
    return out;
}

}  // namespace

std::string binary_prompt(std::string_view claim, std::string_view reference) {
    return attribution_prompt("'attributable' or 'not attributable'.", claim, reference);
}

std::string ternary_prompt(std::string_view claim, std::string_view reference) {
    return attribution_prompt("'support', 'contradict', or 'neutral'.", claim, reference);
}

std::string nugget_list_prompt(const std::vector<std::string>& answer_nuggets,
                               const std::vector<std::string>& document_nuggets) {
    std::string p =
        "For the following lists of answer and document nuggets, select one of the following labels:\n\n"
        "Supports: There is at least one document nugget that supports/agrees with each answer nugget.\n\n"
        "Contradicts: There is at least one document nugget that disagrees with an answer nugget or states its "
        "opposite.\n\n"
        "Neutral: The document nuggets are topically relevant, but lack any information to validate or "
        "invalidate the all of the answer nuggets.\n\n"
        "Not relevant: The document nuggets are not relevant to the answer nuggets.\n\n"
        "Answer Nuggets:";
    p += bullet_list(answer_nuggets);
    p += "\n\nDocument Nuggets:";
    p += bullet_list(document_nuggets);
    return p;
}

std::string judge_claim(std::string_view claim, std::string_view reference, Scheme scheme,
                        gateway::ModelGateway& gateway, const gateway::EndpointConfig& generate) {
    if (scheme == Scheme::binary) return gateway.generate_label(binary_prompt(claim, reference), binary_labels(), generate);
    return gateway.generate_label(ternary_prompt(claim, reference), ternary_labels(), generate);
}

std::string judge_sentence_document(std::string_view sentence, const core::Document& doc, Scheme scheme,
                                    gateway::ModelGateway& gateway, const gateway::EndpointConfig& generate) {
    return judge_claim(sentence, doc.reference_text(), scheme, gateway, generate);
}

MaxSimSentence max_sim_sentence(std::string_view sentence, const core::Document& doc, gateway::ModelGateway& gateway,
                                const gateway::EndpointConfig& embed) {
    if (doc.sentences.empty()) fail(ErrorKind::EmptyDocument, "document " + doc.pmid + " has no sentences");
    std::vector<std::string> texts{std::string(sentence)};
    texts.insert(texts.end(), doc.sentences.begin(), doc.sentences.end());
    const auto vectors = gateway.embed_batch(texts, embed);
    MaxSimSentence best{doc.pmid, 0, doc.sentences[0], -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
        const double c = kernels::cosine(vectors[0].values, vectors[i + 1].values);
        if (c > best.similarity) best = {doc.pmid, i, doc.sentences[i], c};
    }
    return best;
}

QuaternaryLabel judge_nugget_lists(const std::vector<std::string>& answer_nuggets,
                                   const std::vector<std::string>& document_nuggets, gateway::ModelGateway& gateway,
                                   const gateway::EndpointConfig& generate) {
    if (answer_nuggets.empty() || document_nuggets.empty())
        fail(ErrorKind::EmptyNuggetList, "nugget-list judgment needs nuggets on both sides");
    const auto raw =
        gateway.generate_label(nugget_list_prompt(answer_nuggets, document_nuggets), quaternary_labels(), generate);
    return *parse_quaternary(raw);
}

QuaternaryLabel aggregate_pair_labels(const std::vector<std::vector<QuaternaryLabel>>& grid, bool lenient) {
    if (grid.empty() || grid.front().empty()) fail(ErrorKind::EmptyNuggetList, "empty pair-label grid");
    bool any_contradicts = false, any_supports = false, any_neutral = false, every_row_supported = true;
    for (const auto& row : grid) {
        bool row_supported = false;
        for (auto l : row) {
            any_contradicts |= l == QuaternaryLabel::contradicts;
            any_supports |= l == QuaternaryLabel::supports;
            any_neutral |= l == QuaternaryLabel::neutral;
            row_supported |= l == QuaternaryLabel::supports;
        }
        every_row_supported &= row_supported;
    }
    if (any_contradicts) return QuaternaryLabel::contradicts;
    if (lenient ? any_supports : every_row_supported) return QuaternaryLabel::supports;
    if (any_supports || any_neutral) return QuaternaryLabel::neutral;
    return QuaternaryLabel::not_relevant;
}

std::vector<std::vector<QuaternaryLabel>> pairwise_nli_labels(const std::vector<std::string>& answer_nuggets,
                                                              const std::vector<std::string>& document_nuggets,
                                                              gateway::ModelGateway& gateway,
                                                              const gateway::EndpointConfig& nli) {
    std::vector<std::vector<QuaternaryLabel>> grid(answer_nuggets.size(),
                                                   std::vector<QuaternaryLabel>(document_nuggets.size()));
    for (std::size_t i = 0; i < answer_nuggets.size(); ++i) {
        for (std::size_t j = 0; j < document_nuggets.size(); ++j) {
            const auto r = gateway.nli(document_nuggets[j], answer_nuggets[i], nli);
            auto label = QuaternaryLabel::supports;
            double best = r.p_support;
            if (r.p_refute > best) {
                label = QuaternaryLabel::contradicts;
                best = r.p_refute;
            }
            if (r.p_insufficient > best) label = QuaternaryLabel::neutral;
            grid[i][j] = label;
        }
    }
    return grid;
}

double attributable_f1(std::span<const double> scores, const std::vector<bool>& attributable, double t) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= t;
        if (predicted && attributable[i]) ++tp;
        else if (predicted) ++fp;
        else if (attributable[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

ThresholdFit fit_score_threshold(std::span<const double> scores, const std::vector<bool>& attributable) {
    if (scores.size() != attributable.size()) fail(ErrorKind::KeyMismatch, "scores and labels differ in length");
    const auto positives = std::count(attributable.begin(), attributable.end(), true);
    if (positives == 0 || positives == static_cast<long>(attributable.size()))
        fail(ErrorKind::DegenerateLabels, "threshold fitting needs both attributable and non-attributable examples");
    std::vector<double> distinct(scores.begin(), scores.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) candidates.push_back((distinct[i] + distinct[i + 1]) / 2.0);
    candidates.push_back(std::numeric_limits<double>::infinity());
    ThresholdFit best{candidates.front(), attributable_f1(scores, attributable, candidates.front())};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double f1 = attributable_f1(scores, attributable, candidates[i]);
        if (f1 > best.f1) best = {candidates[i], f1};
    }
    return best;
}

SystemCitationMetrics system_citation_metrics(const std::vector<const core::Answer*>& answers,
                                              const std::map<PairKey, QuaternaryLabel>& labels) {
    SystemCitationMetrics m;
    std::size_t covered = 0, supports = 0, contradicts = 0, neutral = 0, not_relevant = 0;
    for (const auto* answer : answers) {
        for (const auto& s : answer->sentences) {
            ++m.sentences;
            bool sentence_covered = false;
            for (const auto& pmid : s.citations) {
                const auto it = labels.find({s.id, pmid});
                if (it == labels.end())
                    fail(ErrorKind::PreconditionFailed, "citation " + pmid + " of sentence " + s.id + " is unjudged");
                ++m.citations;
                switch (it->second) {
                    case QuaternaryLabel::supports:
                        ++supports;
                        sentence_covered = true;
                        break;
                    case QuaternaryLabel::contradicts: ++contradicts; break;
                    case QuaternaryLabel::neutral: ++neutral; break;
                    case QuaternaryLabel::not_relevant: ++not_relevant; break;
                }
            }
            if (sentence_covered) ++covered;
        }
    }
    const auto ratio = [](std::size_t a, std::size_t b) {
        return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    m.citation_coverage = ratio(covered, m.sentences);
    m.citation_support_rate = ratio(supports, m.citations);
    m.citation_contradict_rate = ratio(contradicts, m.citations);
    m.citation_neutral_rate = ratio(neutral, m.citations);
    m.citation_not_relevant_rate = ratio(not_relevant, m.citations);
    return m;
}

}  // namespace bioace::citation
