#include "bioace/core/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bioace/util/text.hpp"

namespace bioace::core {

std::vector<Violation> validate_corpus(const Corpus& corpus) {
    std::vector<Violation> out;
    auto add = [&](std::string id, std::string rule, std::string msg) {
        out.push_back({std::move(id), std::move(rule), std::move(msg)});
    };

    std::set<std::string> qids;
    for (const auto& q : corpus.questions) {
        if (!qids.insert(q.id).second) add(q.id, "duplicate_id", "question id appears more than once");
        if (text::is_blank(q.text)) add(q.id, "empty_text", "question text is empty");
    }

    std::map<std::string, const Document*> docs;
    for (const auto& d : corpus.documents) {
        if (!docs.emplace(d.pmid, &d).second) add(d.pmid, "duplicate_id", "pmid appears more than once");
        std::string joined;
        for (const auto& s : d.sentences) joined += s;
        if (text::strip_whitespace(joined) != text::strip_whitespace(d.abstract_text))
            add(d.pmid, "segmentation", "sentences do not reproduce the abstract");
    }

    auto check_span = [&](const std::string& owner, const EvidenceSpan& span) {
        auto it = docs.find(span.pmid);
        if (it == docs.end()) {
            add(owner, "dangling_reference", "evidence cites unknown pmid " + span.pmid);
            return;
        }
        if (span.start_sentence > span.end_sentence || span.end_sentence >= it->second->sentences.size())
            add(owner, "evidence_range",
                "span [" + std::to_string(span.start_sentence) + ", " + std::to_string(span.end_sentence) +
                    "] outside " + span.pmid + " (" + std::to_string(it->second->sentences.size()) + " sentences)");
    };

    std::set<std::string> sids;
    std::set<std::pair<std::string, std::string>> answers;
    for (const auto& a : corpus.answers) {
        const auto answer_id = a.system_id + "/" + a.question_id;
        if (!qids.count(a.question_id)) add(answer_id, "dangling_reference", "unknown question " + a.question_id);
        if (!answers.emplace(a.system_id, a.question_id).second)
            add(answer_id, "duplicate_id", "answer appears more than once");

        std::vector<std::size_t> positions;
        for (const auto& s : a.sentences) {
            positions.push_back(s.position);
            if (!sids.insert(s.id).second) add(s.id, "duplicate_id", "sentence id appears more than once");
            if (text::is_blank(s.text)) add(s.id, "empty_text", "answer sentence text is empty");
            if (s.question_id != a.question_id || s.system_id != a.system_id)
                add(s.id, "answer_mismatch", "sentence keys disagree with its answer");
            for (const auto& c : s.citations) {
                if (!docs.count(c)) add(s.id, "dangling_reference", "citation of unknown pmid " + c);
            }
            if (s.gold_supporting_docs) {
                for (const auto& c : *s.gold_supporting_docs) {
                    if (!docs.count(c)) add(s.id, "dangling_reference", "supporting doc unknown pmid " + c);
                }
            }
            if (s.gold_evidence) {
                for (const auto& span : *s.gold_evidence) check_span(s.id, span);
            }
        }
        std::sort(positions.begin(), positions.end());
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (positions[i] != i) {
                add(answer_id, "position_contiguity", "sentence positions are not contiguous from 0");
                break;
            }
        }
    }

    std::set<std::pair<std::string, std::string>> gold_texts;
    for (std::size_t i = 0; i < corpus.nuggets.size(); ++i) {
        const auto& n = corpus.nuggets[i];
        const auto id = "nugget#" + std::to_string(i);
        if (!qids.count(n.question_id)) add(id, "dangling_reference", "unknown question " + n.question_id);
        if (text::is_blank(n.text)) add(id, "empty_text", "nugget text is empty");
        if (n.origin == NuggetOrigin::system && !n.system_id)
            add(id, "nugget_system_id", "system nugget without system_id");
        if (n.origin == NuggetOrigin::gold && n.system_id)
            add(id, "nugget_system_id", "gold nugget carries a system_id");
        if (n.origin == NuggetOrigin::gold && !gold_texts.emplace(n.question_id, n.text).second)
            add(id, "duplicate_gold_nugget", "gold nugget repeated for question " + n.question_id);
    }

    std::set<std::pair<std::string, std::string>> judged;
    for (const auto& j : corpus.judgments) {
        if (!sids.count(j.sentence_id))
            add(j.sentence_id, "dangling_reference", "judgment for unknown sentence");
        if (!docs.count(j.pmid)) add(j.sentence_id, "dangling_reference", "judgment for unknown pmid " + j.pmid);
        if (!judged.emplace(j.sentence_id, j.pmid).second)
            add(j.sentence_id, "duplicate_id", "judgment repeated for pmid " + j.pmid);
    }
    return out;
}

}  // namespace bioace::core
