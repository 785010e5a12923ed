#include "bioace/core/types.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "bioace/util/text.hpp"

namespace bioace::core {

std::string_view to_string(RelevanceLabel label) {
    switch (label) {
    case RelevanceLabel::Required: return "Required";
    case RelevanceLabel::Unnecessary: return "Unnecessary";
    case RelevanceLabel::Borderline: return "Borderline";
    case RelevanceLabel::Inappropriate: return "Inappropriate";
    }
    return "";
}

std::optional<RelevanceLabel> parse_relevance(std::string_view s) {
    const auto key = text::to_lower(text::trim(s));
    if (key == "required") return RelevanceLabel::Required;
    if (key == "unnecessary") return RelevanceLabel::Unnecessary;
    if (key == "borderline") return RelevanceLabel::Borderline;
    if (key == "inappropriate") return RelevanceLabel::Inappropriate;
    return std::nullopt;
}

std::string_view to_string(CitationLabel label) {
    switch (label) {
    case CitationLabel::supporting: return "supporting";
    case CitationLabel::contradicting: return "contradicting";
    case CitationLabel::neutral: return "neutral";
    case CitationLabel::not_relevant: return "not relevant";
    }
    return "";
}

std::optional<CitationLabel> parse_citation_label(std::string_view s) {
    auto key = text::to_lower(text::trim(s));
    std::replace(key.begin(), key.end(), '_', ' ');
    if (key == "supporting") return CitationLabel::supporting;
    if (key == "contradicting") return CitationLabel::contradicting;
    if (key == "neutral") return CitationLabel::neutral;
    if (key == "not relevant") return CitationLabel::not_relevant;
    return std::nullopt;
}

std::string Answer::text() const {
    std::string out;
    for (const auto& s : sentences) {
        if (!out.empty()) out += ' ';
        out += s.text;
    }
    return out;
}

std::string Document::reference_text() const { return title + " " + abstract_text; }

const Question* Corpus::find_question(std::string_view id) const {
    auto it = question_index_.find(id);
    return it == question_index_.end() ? nullptr : &questions[it->second];
}

const Document* Corpus::find_document(std::string_view pmid) const {
    auto it = document_index_.find(pmid);
    return it == document_index_.end() ? nullptr : &documents[it->second];
}

const AnswerSentence* Corpus::find_sentence(std::string_view id) const {
    auto it = sentence_index_.find(id);
    if (it == sentence_index_.end()) return nullptr;
    return &answers[it->second.first].sentences[it->second.second];
}

AnswerSentence* Corpus::find_sentence(std::string_view id) {
    return const_cast<AnswerSentence*>(std::as_const(*this).find_sentence(id));
}

void Corpus::reindex() {
    question_index_.clear();
    document_index_.clear();
    sentence_index_.clear();
    for (std::size_t i = 0; i < questions.size(); ++i) question_index_.emplace(questions[i].id, i);
    for (std::size_t i = 0; i < documents.size(); ++i) document_index_.emplace(documents[i].pmid, i);
    for (std::size_t a = 0; a < answers.size(); ++a) {
        for (std::size_t s = 0; s < answers[a].sentences.size(); ++s) {
            sentence_index_.emplace(answers[a].sentences[s].id, std::pair{a, s});
        }
    }
}

std::vector<const Nugget*> Corpus::gold_nuggets(std::string_view question_id) const {
    std::vector<const Nugget*> out;
    for (const auto& n : nuggets) {
        if (n.origin == NuggetOrigin::gold && n.question_id == question_id) out.push_back(&n);
    }
    return out;
}

std::vector<const Nugget*> Corpus::system_nuggets(std::string_view question_id,
                                                  std::string_view system_id) const {
    std::vector<const Nugget*> out;
    for (const auto& n : nuggets) {
        if (n.origin == NuggetOrigin::system && n.question_id == question_id && n.system_id &&
            *n.system_id == system_id) {
            out.push_back(&n);
        }
    }
    return out;
}

std::vector<std::string> Corpus::system_ids() const {
    std::set<std::string> ids;
    for (const auto& a : answers) ids.insert(a.system_id);
    return {ids.begin(), ids.end()};
}

bool Corpus::operator==(const Corpus& other) const {
    return questions == other.questions && documents == other.documents && answers == other.answers &&
           nuggets == other.nuggets && judgments == other.judgments;
}

}  // namespace bioace::core
