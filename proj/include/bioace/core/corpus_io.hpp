#pragma once

#include <filesystem>
#include <optional>

#include "bioace/core/segmenter.hpp"
#include "bioace/core/types.hpp"

namespace bioace::core {

/// File locations of a corpus. Only questions and documents are required;
/// missing optional files load as empty.
struct CorpusPaths {
    std::filesystem::path questions;
    std::filesystem::path documents;
    std::filesystem::path runs;
    std::filesystem::path nuggets;
    std::filesystem::path judgments;

    static CorpusPaths in_directory(const std::filesystem::path& dir);
};

Corpus load_corpus(const std::filesystem::path& dir);
Corpus load_corpus(const CorpusPaths& paths, const SentenceSegmenter& segmenter = RuleBasedSegmenter{});

/// Writes the five JSONL files into `dir` (created if needed).
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Parses one documents.jsonl file on its own (used by `index build`).
std::vector<Document> load_documents(const std::filesystem::path& path,
                                     const SentenceSegmenter& segmenter = RuleBasedSegmenter{});

}  // namespace bioace::core
