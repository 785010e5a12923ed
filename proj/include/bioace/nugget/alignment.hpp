#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bioace/kernels/kernels.hpp"
#include "bioace/nugget/bgmm.hpp"
#include "bioace/nugget/similarity.hpp"

namespace bioace::nugget {

enum class MatchingMode {
    many_to_many,       ///< every pair at or above threshold
    greedy_one_to_one,  ///< highest-probability pairs first, each nugget used once
};

struct AlignedPair {
    std::size_t sys = 0;
    std::size_t gold = 0;
    double probability = 0.0;
    double similarity = 0.0;

    bool operator==(const AlignedPair&) const = default;
};

struct AlignmentResult {
    std::vector<AlignedPair> pairs;  ///< sorted by (sys, gold)
    double threshold_used = 0.0;
    bool fallback_used = false;
};

struct AlignOptions {
    double raw_cosine_fallback = 0.75;
    MatchingMode mode = MatchingMode::many_to_many;
};

/// similar_probability applied to every matrix cell.
kernels::Matrix probability_matrix(const kernels::Matrix& similarity, const BgmmModel& model,
                                   kernels::Backend backend = kernels::default_backend());

/// Pairs whose probability is >= threshold.
AlignmentResult align_by_probability(const kernels::Matrix& probability, const kernels::Matrix& similarity,
                                     double threshold, MatchingMode mode = MatchingMode::many_to_many);

/// Probability rule when a two-component model is given; otherwise the
/// raw-cosine fallback (similarity >= options.raw_cosine_fallback).
AlignmentResult align_nuggets(const SimilarityMatrix& matrix, const BgmmModel* model, double threshold,
                              const AlignOptions& options = {});

struct NuggetPrf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

NuggetPrf score_prf(const AlignmentResult& alignment, std::size_t n_sys, std::size_t n_gold);

}  // namespace bioace::nugget
