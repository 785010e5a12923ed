#include "bioace/nugget/threshold.hpp"

#include <cmath>

#include "bioace/error.hpp"

namespace bioace::nugget {

const std::map<std::string, double>& default_thresholds() {
    static const std::map<std::string, double> defaults{
        {"all-MiniLM-L6-v2", 0.6267},
        {"sup-simcse-roberta-large", 0.6035},
        {"all-mpnet-base-v2", 0.6211},
    };
    return defaults;
}

std::optional<double> default_threshold_for(const std::string& embed_model_id) {
    const auto& d = default_thresholds();
    if (auto it = d.find(embed_model_id); it != d.end()) return it->second;
    // Accept hub-qualified ids such as "sentence-transformers/all-MiniLM-L6-v2".
    const auto slash = embed_model_id.rfind('/');
    if (slash != std::string::npos) {
        if (auto it = d.find(embed_model_id.substr(slash + 1)); it != d.end()) return it->second;
    }
    return std::nullopt;
}

TuningInstance make_tuning_instance(const SimilarityMatrix& matrix, const BgmmModel& model,
                                    double raw_cosine_fallback) {
    if (model.degenerate()) {
        return {matrix.values,
                kernels::map_matrix(matrix.values, [&](double s) { return s >= raw_cosine_fallback ? 1.0 : 0.0; })};
    }
    return {matrix.values, probability_matrix(matrix.values, model)};
}

std::vector<double> ThresholdGrid::points() const {
    if (!(step > 0.0) || hi < lo) fail(ErrorKind::PreconditionFailed, "threshold grid needs step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    // Decimal steps (1e-4) are generated as integer / 10^d so grid points are
    // the correctly rounded decimals, e.g. 0.5801 rather than 0.58010000000000006.
    const double inv = 1.0 / step;
    const bool decimal = std::abs(inv - std::round(inv)) < 1e-9;
    std::vector<double> pts(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (decimal) {
            const double base = std::round(lo * std::round(inv));
            pts[i] = (base + static_cast<double>(i)) / std::round(inv);
        } else {
            pts[i] = lo + static_cast<double>(i) * step;
        }
    }
    return pts;
}

ThresholdObjectives evaluate_threshold(std::span<const TuningInstance> train, double threshold,
                                       const ObjectiveWeights& weights) {
    ThresholdObjectives o;
    o.threshold = threshold;
    for (const auto& inst : train) {
        const auto& p = inst.probability;
        const auto& s = inst.similarity;
        std::vector<bool> sys_hit(p.rows, false), gold_hit(p.cols, false);
        std::size_t matched = 0;
        double sim_sum = 0.0;
        for (std::size_t i = 0; i < p.rows; ++i) {
            for (std::size_t j = 0; j < p.cols; ++j) {
                if (p(i, j) >= threshold) {
                    ++matched;
                    sim_sum += s(i, j);
                    sys_hit[i] = true;
                    gold_hit[j] = true;
                }
            }
        }
        double hits_sys = 0.0, hits_gold = 0.0;
        for (bool b : sys_hit) hits_sys += b ? 1.0 : 0.0;
        for (bool b : gold_hit) hits_gold += b ? 1.0 : 0.0;
        const double precision = hits_sys / static_cast<double>(p.rows);
        const double recall = hits_gold / static_cast<double>(p.cols);
        const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        o.avg_f1 += f1;
        o.avg_similarity += matched ? sim_sum / static_cast<double>(matched) : 0.0;
        o.avg_alignments += static_cast<double>(matched) / static_cast<double>(p.rows * p.cols);
    }
    const auto n = static_cast<double>(train.size());
    o.avg_f1 /= n;
    o.avg_similarity /= n;
    o.avg_alignments /= n;
    o.scalarized = weights.f1 * o.avg_f1 + weights.similarity * o.avg_similarity + weights.alignments * o.avg_alignments;
    return o;
}

std::vector<ThresholdObjectives> sweep_thresholds(std::span<const TuningInstance> train, const ThresholdGrid& grid,
                                                  const ObjectiveWeights& weights, kernels::Backend backend) {
    if (train.empty()) fail(ErrorKind::EmptyTrainSet, "threshold tuning needs at least one instance");
    for (const auto& inst : train) {
        if (inst.probability.empty()) fail(ErrorKind::EmptyMatrix, "tuning instance with an empty matrix");
    }
    const auto points = grid.points();
    return kernels::evaluate_grid<ThresholdObjectives>(
        points.size(), [&](std::size_t i) { return evaluate_threshold(train, points[i], weights); }, backend);
}

ThresholdSearchResult tune_threshold(std::span<const TuningInstance> train, const ThresholdGrid& grid,
                                     const ObjectiveWeights& weights, kernels::Backend backend) {
    const auto sweep = sweep_thresholds(train, grid, weights, backend);
    std::size_t best = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (sweep[i].scalarized > sweep[best].scalarized) best = i;
    }
    return sweep[best];
}

}  // namespace bioace::nugget
