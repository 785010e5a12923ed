#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bioace::stats {

/// Rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> counts;

    explicit ConfusionMatrix(std::vector<std::string> class_names);

    /// Throws PreconditionFailed on a label outside `classes`.
    void add(const std::string& gold, const std::string& predicted, std::size_t n = 1);
    std::size_t total() const;
    std::size_t index_of(const std::string& label) const;
};

enum class Averaging { macro, weighted };

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Per-class scores, 0 on empty denominators.
std::vector<Prf> per_class_prf(const ConfusionMatrix& matrix);
Prf prf(const ConfusionMatrix& matrix, Averaging averaging);

/// Mann-Whitney AUC with ties credited 1/2.
double auc(std::span<const double> positives, std::span<const double> negatives);

/// Ascending average ranks (1-based); tied values share the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
/// Kendall tau-b.
double kendall(std::span<const double> x, std::span<const double> y);

struct SystemRanking {
    std::string metric_name;
    std::map<std::string, double> ranks;  ///< 1 = best
};

/// Descending by value; ties get the average rank. Throws TooFewSystems below 2.
SystemRanking rank_systems(const std::map<std::string, double>& metric_values, std::string metric_name = {});

struct CorrelationResult {
    double spearman = 0.0;
    double kendall = 0.0;
    std::size_t n = 0;
};

CorrelationResult correlate_rankings(const std::map<std::string, double>& auto_metric,
                                     const std::map<std::string, double>& reference_metric);

}  // namespace bioace::stats
