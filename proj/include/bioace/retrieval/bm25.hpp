#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bioace::retrieval {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::size_t doc = 0;
    std::size_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct IndexUnit {
    std::string label;  ///< external id: a pmid, or "pmid#start" for fragments
    std::string text;
};

/// Inverted index over a fixed list of units. doc_ref is the unit's position
/// in the build input.
struct InvertedIndex {
    std::map<std::string, std::vector<Posting>, std::less<>> postings;
    std::vector<std::size_t> doc_lengths;
    std::vector<std::string> labels;
    double avg_doc_length = 0.0;

    std::size_t doc_count() const { return doc_lengths.size(); }
    std::size_t document_frequency(std::string_view term) const;

    bool operator==(const InvertedIndex&) const = default;
};

struct ScoredDoc {
    std::size_t doc = 0;
    double score = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

InvertedIndex build_index(const std::vector<IndexUnit>& units);

/// ln((N - df + 0.5) / (df + 0.5) + 1)
double bm25_idf(std::size_t doc_count, std::size_t df);

/// Distinct query terms in first-occurrence order.
std::vector<std::string> query_terms(std::string_view query);

/// Top-k documents by BM25; non-increasing scores, ties by ascending doc_ref.
/// Documents with score 0 are included, so k >= doc_count returns every doc.
std::vector<ScoredDoc> bm25_top_k(std::string_view query, const InvertedIndex& index, const Bm25Params& params,
                                  std::size_t k);

/// Scores of every document, indexed by doc_ref.
std::vector<double> bm25_scores(std::string_view query, const InvertedIndex& index, const Bm25Params& params);

void save_index(const InvertedIndex& index, const std::filesystem::path& path);
InvertedIndex load_index(const std::filesystem::path& path);

}  // namespace bioace::retrieval
