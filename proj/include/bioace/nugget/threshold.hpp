#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bioace/kernels/kernels.hpp"
#include "bioace/nugget/alignment.hpp"

namespace bioace::nugget {

/// Probability thresholds shipped for the three sentence-embedding models.
const std::map<std::string, double>& default_thresholds();
std::optional<double> default_threshold_for(const std::string& embed_model_id);

/// One training question: similarities plus the per-cell "similar"
/// probabilities the threshold is compared against.
struct TuningInstance {
    kernels::Matrix similarity;
    kernels::Matrix probability;
};

/// Probabilities from the fitted model; a degenerate model contributes the
/// fallback indicator (1 where similarity >= fallback cosine, else 0).
TuningInstance make_tuning_instance(const SimilarityMatrix& matrix, const BgmmModel& model,
                                    double raw_cosine_fallback = 0.75);

struct ThresholdGrid {
    double lo = 0.50;
    double hi = 0.95;
    double step = 1e-4;

    std::vector<double> points() const;
};

struct ObjectiveWeights {
    double f1 = 1.0;
    double similarity = 1.0;
    double alignments = 1.0;
};

struct ThresholdObjectives {
    double threshold = 0.0;
    double avg_f1 = 0.0;
    double avg_similarity = 0.0;  ///< mean similarity of matched pairs (0 when none), averaged over instances
    double avg_alignments = 0.0;  ///< matched pairs / (n_sys * n_gold), averaged over instances
    double scalarized = 0.0;
};

using ThresholdSearchResult = ThresholdObjectives;

ThresholdObjectives evaluate_threshold(std::span<const TuningInstance> train, double threshold,
                                       const ObjectiveWeights& weights);

/// Exhaustive grid sweep; argmax of the scalarized objective, ties to the smallest threshold.
ThresholdSearchResult tune_threshold(std::span<const TuningInstance> train, const ThresholdGrid& grid = {},
                                     const ObjectiveWeights& weights = {},
                                     kernels::Backend backend = kernels::default_backend());

/// Every grid point's objectives (plot-ready sweep).
std::vector<ThresholdObjectives> sweep_thresholds(std::span<const TuningInstance> train, const ThresholdGrid& grid,
                                                  const ObjectiveWeights& weights,
                                                  kernels::Backend backend = kernels::default_backend());

}  // namespace bioace::nugget
