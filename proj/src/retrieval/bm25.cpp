#include "bioace/retrieval/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "bioace/error.hpp"
#include "bioace/kernels/kernels.hpp"
#include "bioace/retrieval/tokenizer.hpp"

namespace bioace::retrieval {

std::size_t InvertedIndex::document_frequency(std::string_view term) const {
    auto it = postings.find(term);
    return it == postings.end() ? 0 : it->second.size();
}

InvertedIndex build_index(const std::vector<IndexUnit>& units) {
    if (units.empty()) fail(ErrorKind::EmptyCorpus, "cannot index an empty unit list");
    InvertedIndex index;
    index.doc_lengths.reserve(units.size());
    index.labels.reserve(units.size());
    std::size_t total = 0;
    for (std::size_t doc = 0; doc < units.size(); ++doc) {
        const auto tokens = tokenize(units[doc].text);
        std::map<std::string, std::size_t, std::less<>> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, count] : tf) index.postings[term].push_back({doc, count});
        index.doc_lengths.push_back(tokens.size());
        index.labels.push_back(units[doc].label);
        total += tokens.size();
    }
    index.avg_doc_length = static_cast<double>(total) / static_cast<double>(units.size());
    return index;
}

double bm25_idf(std::size_t doc_count, std::size_t df) {
    const auto n = static_cast<double>(doc_count);
    const auto d = static_cast<double>(df);
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

std::vector<std::string> query_terms(std::string_view query) {
    std::vector<std::string> terms;
    std::set<std::string> seen;
    for (auto& t : tokenize(query)) {
        if (seen.insert(t).second) terms.push_back(std::move(t));
    }
    return terms;
}

std::vector<double> bm25_scores(std::string_view query, const InvertedIndex& index, const Bm25Params& params) {
    std::vector<double> scores(index.doc_count(), 0.0);
    // An index whose documents are all empty has avg length 0; every tf is 0 then too.
    const double avg = index.avg_doc_length > 0.0 ? index.avg_doc_length : 1.0;

    std::vector<std::vector<std::size_t>> docs;
    std::vector<std::vector<double>> contributions;
    for (const auto& term : query_terms(query)) {
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        const double idf = bm25_idf(index.doc_count(), it->second.size());
        auto& d = docs.emplace_back();
        auto& c = contributions.emplace_back();
        d.reserve(it->second.size());
        c.reserve(it->second.size());
        for (const auto& p : it->second) {
            const double tf = static_cast<double>(p.tf);
            const double len = static_cast<double>(index.doc_lengths[p.doc]);
            const double norm = params.k1 * (1.0 - params.b + params.b * len / avg);
            d.push_back(p.doc);
            c.push_back(idf * tf * (params.k1 + 1.0) / (tf + norm));
        }
    }
    std::vector<kernels::WeightedPostings> terms;
    for (std::size_t i = 0; i < docs.size(); ++i) terms.push_back({&docs[i], &contributions[i]});
    kernels::accumulate_postings(terms, scores);
    return scores;
}

std::vector<ScoredDoc> bm25_top_k(std::string_view query, const InvertedIndex& index, const Bm25Params& params,
                                  std::size_t k) {
    const auto scores = bm25_scores(query, index, params);
    std::vector<ScoredDoc> ranked(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) ranked[i] = {i, scores[i]};
    auto better = [](const ScoredDoc& x, const ScoredDoc& y) {
        return x.score != y.score ? x.score > y.score : x.doc < y.doc;
    };
    k = std::min(k, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(), better);
    ranked.resize(k);
    return ranked;
}

void save_index(const InvertedIndex& index, const std::filesystem::path& path) {
    nlohmann::json postings = nlohmann::json::object();
    for (const auto& [term, list] : index.postings) {
        auto& arr = postings[term] = nlohmann::json::array();
        for (const auto& p : list) arr.push_back({p.doc, p.tf});
    }
    nlohmann::json j{{"format", "bioace-bm25-index/1"},
                     {"doc_count", index.doc_count()},
                     {"avg_doc_length", index.avg_doc_length},
                     {"labels", index.labels},
                     {"doc_lengths", index.doc_lengths},
                     {"postings", std::move(postings)}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    out << j.dump() << '\n';
}

InvertedIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        InvertedIndex index;
        index.labels = j.at("labels").get<std::vector<std::string>>();
        index.doc_lengths = j.at("doc_lengths").get<std::vector<std::size_t>>();
        index.avg_doc_length = j.at("avg_doc_length").get<double>();
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& list = index.postings[term];
            for (const auto& p : arr) {
                const auto doc = p.at(0).get<std::size_t>();
                if (doc >= index.doc_lengths.size())
                    throw MalformedRecordError(path.filename().string(), 1, "postings", "doc_ref out of range");
                list.push_back({doc, p.at(1).get<std::size_t>()});
            }
        }
        if (index.labels.size() != index.doc_lengths.size())
            throw MalformedRecordError(path.filename().string(), 1, "labels", "length differs from doc_lengths");
        return index;
    } catch (const nlohmann::json::exception& e) {
        throw MalformedRecordError(path.filename().string(), 1, "<json>", e.what());
    }
}

}  // namespace bioace::retrieval
