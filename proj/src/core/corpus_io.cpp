#include "bioace/core/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "bioace/error.hpp"
#include "bioace/util/text.hpp"

namespace bioace::core {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Record {
    const std::string& file;
    std::size_t line;
    const json& obj;

    [[noreturn]] void malformed(const std::string& field, const std::string& detail) const {
        throw MalformedRecordError(file, line, field, detail);
    }

    const json& require(const std::string& field) const {
        auto it = obj.find(field);
        if (it == obj.end()) malformed(field, "missing");
        return *it;
    }

    std::string string(const std::string& field) const {
        const auto& v = require(field);
        if (!v.is_string()) malformed(field, "expected string");
        return v.get<std::string>();
    }

    std::optional<std::string> optional_string(const std::string& field) const {
        auto it = obj.find(field);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) malformed(field, "expected string");
        return it->get<std::string>();
    }

    std::size_t index(const json& v, const std::string& field) const {
        if (!v.is_number_integer() || v.get<long long>() < 0) malformed(field, "expected non-negative integer");
        return v.get<std::size_t>();
    }

    std::size_t index(const std::string& field) const { return index(require(field), field); }
};

json extras_of(const json& obj, std::initializer_list<const char*> known) {
    json extra = json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }) ==
            known.end()) {
            extra[it.key()] = it.value();
        }
    }
    return extra;
}

void merge_extras(json& target, const json& extra) {
    for (auto it = extra.begin(); it != extra.end(); ++it) target[it.key()] = it.value();
}

/// Calls fn(record) for every non-blank line of a JSONL file. Missing optional files are skipped.
void for_each_record(const fs::path& path, bool required, const std::function<void(const Record&)>& fn) {
    if (path.empty() || !fs::exists(path)) {
        if (required) fail(ErrorKind::IoError, "missing input file " + path.string());
        return;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    const std::string file = path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecordError(file, line_no, "<json>", e.what());
        }
        if (!obj.is_object()) throw MalformedRecordError(file, line_no, "<json>", "expected object");
        fn(Record{file, line_no, obj});
    }
}

Document parse_document(const Record& r, const SentenceSegmenter& segmenter) {
    Document d;
    d.pmid = r.string("pmid");
    d.title = r.optional_string("title").value_or("");
    d.abstract_text = r.string("abstract");
    d.sentences = segmenter.split(d.abstract_text);
    d.extra = extras_of(r.obj, {"pmid", "title", "abstract"});
    return d;
}

void write_lines(const fs::path& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    for (const auto& r : records) out << r.dump() << '\n';
    if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace

CorpusPaths CorpusPaths::in_directory(const fs::path& dir) {
    return {dir / "questions.jsonl", dir / "documents.jsonl", dir / "runs.jsonl", dir / "nuggets.jsonl",
            dir / "judgments.jsonl"};
}

Corpus load_corpus(const fs::path& dir) { return load_corpus(CorpusPaths::in_directory(dir)); }

std::vector<Document> load_documents(const fs::path& path, const SentenceSegmenter& segmenter) {
    std::vector<Document> docs;
    std::set<std::string> seen;
    for_each_record(path, true, [&](const Record& r) {
        auto d = parse_document(r, segmenter);
        if (!seen.insert(d.pmid).second) fail(ErrorKind::DuplicateId, "duplicate pmid " + d.pmid);
        docs.push_back(std::move(d));
    });
    return docs;
}

Corpus load_corpus(const CorpusPaths& paths, const SentenceSegmenter& segmenter) {
    Corpus corpus;

    std::set<std::string> question_ids;
    for_each_record(paths.questions, true, [&](const Record& r) {
        Question q{r.string("id"), r.string("text"), extras_of(r.obj, {"id", "text"})};
        if (!question_ids.insert(q.id).second) fail(ErrorKind::DuplicateId, "duplicate question id " + q.id);
        corpus.questions.push_back(std::move(q));
    });

    corpus.documents = load_documents(paths.documents, segmenter);
    std::set<std::string> pmids;
    for (const auto& d : corpus.documents) pmids.insert(d.pmid);

    auto require_question = [&](const std::string& id, const Record& r) {
        if (!question_ids.count(id))
            fail(ErrorKind::DanglingReference, r.file + ":" + std::to_string(r.line) + ": unknown question " + id);
    };
    auto require_pmid = [&](const std::string& pmid, const Record& r) {
        if (!pmids.count(pmid))
            fail(ErrorKind::DanglingReference, r.file + ":" + std::to_string(r.line) + ": unknown pmid " + pmid);
    };

    std::set<std::string> sentence_ids;
    std::set<std::pair<std::string, std::string>> answer_keys;
    for_each_record(paths.runs, false, [&](const Record& r) {
        Answer a;
        a.system_id = r.string("system_id");
        a.question_id = r.string("question_id");
        require_question(a.question_id, r);
        if (!answer_keys.emplace(a.system_id, a.question_id).second)
            fail(ErrorKind::DuplicateId, "duplicate answer for system " + a.system_id + " / question " + a.question_id);
        const auto& sentences = r.require("sentences");
        if (!sentences.is_array()) r.malformed("sentences", "expected array");
        for (const auto& js : sentences) {
            if (!js.is_object()) r.malformed("sentences", "expected object");
            Record sr{r.file, r.line, js};
            AnswerSentence s;
            s.id = sr.string("id");
            s.question_id = a.question_id;
            s.system_id = a.system_id;
            s.position = sr.index("position");
            s.text = sr.string("text");
            if (auto it = js.find("citations"); it != js.end()) {
                if (!it->is_array()) sr.malformed("citations", "expected array");
                for (const auto& c : *it) {
                    if (!c.is_string()) sr.malformed("citations", "expected pmid string");
                    require_pmid(c.get<std::string>(), r);
                    s.citations.push_back(c.get<std::string>());
                }
            }
            s.extra = extras_of(js, {"id", "position", "text", "citations"});
            if (!sentence_ids.insert(s.id).second) fail(ErrorKind::DuplicateId, "duplicate sentence id " + s.id);
            a.sentences.push_back(std::move(s));
        }
        std::stable_sort(a.sentences.begin(), a.sentences.end(),
                         [](const auto& x, const auto& y) { return x.position < y.position; });
        a.extra = extras_of(r.obj, {"system_id", "question_id", "sentences"});
        corpus.answers.push_back(std::move(a));
    });

    for_each_record(paths.nuggets, false, [&](const Record& r) {
        Nugget n;
        n.question_id = r.string("question_id");
        require_question(n.question_id, r);
        const auto origin = r.string("origin");
        if (origin == "gold") {
            n.origin = NuggetOrigin::gold;
        } else if (origin == "system") {
            n.origin = NuggetOrigin::system;
        } else {
            r.malformed("origin", "expected \"gold\" or \"system\", got \"" + origin + "\"");
        }
        n.system_id = r.optional_string("system_id");
        n.text = r.string("text");
        n.extra = extras_of(r.obj, {"question_id", "origin", "system_id", "text"});
        corpus.nuggets.push_back(std::move(n));
    });

    corpus.reindex();

    std::set<std::pair<std::string, std::string>> judged;
    for_each_record(paths.judgments, false, [&](const Record& r) {
        const auto sentence_id = r.string("sentence_id");
        auto* sentence = corpus.find_sentence(sentence_id);
        if (!sentence) {
            fail(ErrorKind::DanglingReference,
                 r.file + ":" + std::to_string(r.line) + ": unknown sentence " + sentence_id);
        }
        if (r.obj.contains("label")) {
            CitationJudgment j;
            j.sentence_id = sentence_id;
            j.pmid = r.string("pmid");
            require_pmid(j.pmid, r);
            const auto raw = r.string("label");
            auto label = parse_citation_label(raw);
            if (!label) r.malformed("label", "unknown citation label \"" + raw + "\"");
            j.label = *label;
            if (!judged.emplace(j.sentence_id, j.pmid).second)
                fail(ErrorKind::DuplicateId, "duplicate judgment for (" + j.sentence_id + ", " + j.pmid + ")");
            j.extra = extras_of(r.obj, {"sentence_id", "pmid", "label"});
            if (!sentence->gold_supporting_docs) sentence->gold_supporting_docs.emplace();
            if (j.label == CitationLabel::supporting) sentence->gold_supporting_docs->push_back(j.pmid);
            corpus.judgments.push_back(std::move(j));
        } else if (r.obj.contains("relevance")) {
            const auto raw = r.string("relevance");
            auto label = parse_relevance(raw);
            if (!label) r.malformed("relevance", "unknown relevance label \"" + raw + "\"");
            if (sentence->gold_relevance)
                fail(ErrorKind::DuplicateId, "duplicate relevance judgment for " + sentence_id);
            sentence->gold_relevance = *label;
            auto extra = extras_of(r.obj, {"sentence_id", "relevance"});
            if (!extra.empty()) sentence->gold_extra["relevance"] = std::move(extra);
        } else if (r.obj.contains("evidence")) {
            const auto& ev = r.require("evidence");
            if (!ev.is_array()) r.malformed("evidence", "expected array");
            if (!sentence->gold_evidence) sentence->gold_evidence.emplace();
            for (const auto& e : ev) {
                if (!e.is_object()) r.malformed("evidence", "expected object");
                Record er{r.file, r.line, e};
                EvidenceSpan span{er.string("pmid"), er.index("start_sentence"), er.index("end_sentence")};
                require_pmid(span.pmid, r);
                sentence->gold_evidence->push_back(std::move(span));
            }
            auto extra = extras_of(r.obj, {"sentence_id", "evidence"});
            if (!extra.empty()) merge_extras(sentence->gold_extra["evidence"], extra);
        } else {
            r.malformed("label", "record has none of label / relevance / evidence");
        }
    });

    return corpus;
}

void save_corpus(const Corpus& corpus, const fs::path& dir) {
    fs::create_directories(dir);
    const auto paths = CorpusPaths::in_directory(dir);

    std::vector<json> lines;
    for (const auto& q : corpus.questions) {
        json j = q.extra;
        j["id"] = q.id;
        j["text"] = q.text;
        lines.push_back(std::move(j));
    }
    write_lines(paths.questions, lines);

    lines.clear();
    for (const auto& d : corpus.documents) {
        json j = d.extra;
        j["pmid"] = d.pmid;
        j["title"] = d.title;
        j["abstract"] = d.abstract_text;
        lines.push_back(std::move(j));
    }
    write_lines(paths.documents, lines);

    lines.clear();
    for (const auto& a : corpus.answers) {
        json j = a.extra;
        j["system_id"] = a.system_id;
        j["question_id"] = a.question_id;
        json sentences = json::array();
        for (const auto& s : a.sentences) {
            json js = s.extra;
            js["id"] = s.id;
            js["position"] = s.position;
            js["text"] = s.text;
            js["citations"] = s.citations;
            sentences.push_back(std::move(js));
        }
        j["sentences"] = std::move(sentences);
        lines.push_back(std::move(j));
    }
    write_lines(paths.runs, lines);

    lines.clear();
    for (const auto& n : corpus.nuggets) {
        json j = n.extra;
        j["question_id"] = n.question_id;
        j["origin"] = n.origin == NuggetOrigin::gold ? "gold" : "system";
        if (n.system_id) j["system_id"] = *n.system_id;
        j["text"] = n.text;
        lines.push_back(std::move(j));
    }
    write_lines(paths.nuggets, lines);

    lines.clear();
    for (const auto& cj : corpus.judgments) {
        json j = cj.extra;
        j["sentence_id"] = cj.sentence_id;
        j["pmid"] = cj.pmid;
        j["label"] = std::string(to_string(cj.label));
        lines.push_back(std::move(j));
    }
    for (const auto& a : corpus.answers) {
        for (const auto& s : a.sentences) {
            if (s.gold_relevance) {
                json j = s.gold_extra.value("relevance", json::object());
                j["sentence_id"] = s.id;
                j["relevance"] = std::string(to_string(*s.gold_relevance));
                lines.push_back(std::move(j));
            }
            if (s.gold_evidence) {
                json j = s.gold_extra.value("evidence", json::object());
                j["sentence_id"] = s.id;
                json ev = json::array();
                for (const auto& span : *s.gold_evidence) {
                    ev.push_back({{"pmid", span.pmid},
                                  {"start_sentence", span.start_sentence},
                                  {"end_sentence", span.end_sentence}});
                }
                j["evidence"] = std::move(ev);
                lines.push_back(std::move(j));
            }
        }
    }
    write_lines(paths.judgments, lines);
}

}  // namespace bioace::core
