#include "bioace/nugget/alignment.hpp"

#include <algorithm>
#include <set>

#include "bioace/error.hpp"

namespace bioace::nugget {

kernels::Matrix probability_matrix(const kernels::Matrix& similarity, const BgmmModel& model,
                                   kernels::Backend backend) {
    if (model.degenerate()) fail(ErrorKind::DegenerateModel, "mixture has a single component");
    return kernels::map_matrix(similarity, [&](double s) { return similar_probability(model, s); }, backend);
}

AlignmentResult align_by_probability(const kernels::Matrix& probability, const kernels::Matrix& similarity,
                                     double threshold, MatchingMode mode) {
    if (probability.rows != similarity.rows || probability.cols != similarity.cols)
        fail(ErrorKind::DimensionMismatch, "probability and similarity matrices differ in shape");
    AlignmentResult result;
    result.threshold_used = threshold;
    for (std::size_t i = 0; i < probability.rows; ++i) {
        for (std::size_t j = 0; j < probability.cols; ++j) {
            if (probability(i, j) >= threshold) result.pairs.push_back({i, j, probability(i, j), similarity(i, j)});
        }
    }
    if (mode == MatchingMode::greedy_one_to_one) {
        auto candidates = result.pairs;
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const auto& a, const auto& b) { return a.probability > b.probability; });
        std::set<std::size_t> used_sys, used_gold;
        result.pairs.clear();
        for (const auto& p : candidates) {
            if (used_sys.count(p.sys) || used_gold.count(p.gold)) continue;
            used_sys.insert(p.sys);
            used_gold.insert(p.gold);
            result.pairs.push_back(p);
        }
        std::sort(result.pairs.begin(), result.pairs.end(),
                  [](const auto& a, const auto& b) { return std::pair(a.sys, a.gold) < std::pair(b.sys, b.gold); });
    }
    return result;
}

AlignmentResult align_nuggets(const SimilarityMatrix& matrix, const BgmmModel* model, double threshold,
                              const AlignOptions& options) {
    if (matrix.values.empty()) fail(ErrorKind::EmptyInput, "alignment needs a non-empty similarity matrix");
    if (model && !model->degenerate()) {
        return align_by_probability(probability_matrix(matrix.values, *model), matrix.values, threshold, options.mode);
    }
    // Raw-cosine fallback: the indicator plays the role of the probability.
    const auto indicator = kernels::map_matrix(
        matrix.values, [&](double s) { return s >= options.raw_cosine_fallback ? 1.0 : 0.0; });
    auto result = align_by_probability(indicator, matrix.values, 1.0, options.mode);
    result.threshold_used = options.raw_cosine_fallback;
    result.fallback_used = true;
    return result;
}

NuggetPrf score_prf(const AlignmentResult& alignment, std::size_t n_sys, std::size_t n_gold) {
    if (n_sys == 0 || n_gold == 0) fail(ErrorKind::PreconditionFailed, "score_prf needs at least one nugget per side");
    std::vector<bool> sys_hit(n_sys, false), gold_hit(n_gold, false);
    for (const auto& p : alignment.pairs) {
        if (p.sys >= n_sys || p.gold >= n_gold) fail(ErrorKind::PreconditionFailed, "aligned pair out of range");
        sys_hit[p.sys] = true;
        gold_hit[p.gold] = true;
    }
    NuggetPrf out;
    out.precision = static_cast<double>(std::count(sys_hit.begin(), sys_hit.end(), true)) / static_cast<double>(n_sys);
    out.recall = static_cast<double>(std::count(gold_hit.begin(), gold_hit.end(), true)) / static_cast<double>(n_gold);
    const double denom = out.precision + out.recall;
    out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
    return out;
}

}  // namespace bioace::nugget
