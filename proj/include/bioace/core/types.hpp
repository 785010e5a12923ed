#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bioace::core {

using DocumentId = std::string;

struct Question {
    std::string id;
    std::string text;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const Question&) const = default;
};

enum class RelevanceLabel { Required, Unnecessary, Borderline, Inappropriate };

inline constexpr std::size_t kRelevanceLabelCount = 4;

std::string_view to_string(RelevanceLabel label);
/// Case-insensitive, surrounding whitespace ignored.
std::optional<RelevanceLabel> parse_relevance(std::string_view s);

/// Sentence-granular evidence span, end inclusive.
struct EvidenceSpan {
    DocumentId pmid;
    std::size_t start_sentence = 0;
    std::size_t end_sentence = 0;

    bool contains(std::size_t sentence) const {
        return sentence >= start_sentence && sentence <= end_sentence;
    }
    bool operator==(const EvidenceSpan&) const = default;
};

struct AnswerSentence {
    std::string id;
    std::string question_id;
    std::string system_id;
    std::size_t position = 0;
    std::string text;
    std::vector<DocumentId> citations;
    std::optional<RelevanceLabel> gold_relevance;
    std::optional<std::vector<DocumentId>> gold_supporting_docs;
    std::optional<std::vector<EvidenceSpan>> gold_evidence;
    nlohmann::json extra = nlohmann::json::object();
    /// Unknown fields of the relevance / evidence judgment records, keyed
    /// "relevance" and "evidence".
    nlohmann::json gold_extra = nlohmann::json::object();

    bool operator==(const AnswerSentence&) const = default;
};

/// One system's answer to one question.
struct Answer {
    std::string system_id;
    std::string question_id;
    std::vector<AnswerSentence> sentences;
    nlohmann::json extra = nlohmann::json::object();

    std::string text() const;
    bool operator==(const Answer&) const = default;
};

enum class NuggetOrigin { gold, system };

struct Nugget {
    std::string text;
    NuggetOrigin origin = NuggetOrigin::gold;
    std::string question_id;
    std::optional<std::string> system_id;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const Nugget&) const = default;
};

struct Document {
    DocumentId pmid;
    std::string title;
    std::string abstract_text;
    std::vector<std::string> sentences;
    nlohmann::json extra = nlohmann::json::object();

    /// title + " " + abstract
    std::string reference_text() const;
    bool operator==(const Document&) const = default;
};

enum class CitationLabel { supporting, contradicting, neutral, not_relevant };

std::string_view to_string(CitationLabel label);
std::optional<CitationLabel> parse_citation_label(std::string_view s);

struct CitationJudgment {
    std::string sentence_id;
    DocumentId pmid;
    CitationLabel label = CitationLabel::neutral;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const CitationJudgment&) const = default;
};

/// Fully cross-referenced in-memory corpus. Immutable after load.
struct Corpus {
    std::vector<Question> questions;
    std::vector<Document> documents;
    std::vector<Answer> answers;
    std::vector<Nugget> nuggets;
    std::vector<CitationJudgment> judgments;

    const Question* find_question(std::string_view id) const;
    const Document* find_document(std::string_view pmid) const;
    const AnswerSentence* find_sentence(std::string_view id) const;
    AnswerSentence* find_sentence(std::string_view id);

    /// Rebuilds the lookup tables; call after mutating the vectors.
    void reindex();

    std::vector<const Nugget*> gold_nuggets(std::string_view question_id) const;
    std::vector<const Nugget*> system_nuggets(std::string_view question_id,
                                              std::string_view system_id) const;
    std::vector<std::string> system_ids() const;

    bool operator==(const Corpus& other) const;

private:
    std::map<std::string, std::size_t, std::less<>> question_index_;
    std::map<std::string, std::size_t, std::less<>> document_index_;
    std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> sentence_index_;
};

}  // namespace bioace::core
