#include "bioace/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bioace/error.hpp"

namespace bioace::stats {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_names)
    : classes(std::move(class_names)), counts(classes.size(), std::vector<std::size_t>(classes.size(), 0)) {}

std::size_t ConfusionMatrix::index_of(const std::string& label) const {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) fail(ErrorKind::PreconditionFailed, "label '" + label + "' is not a matrix class");
    return static_cast<std::size_t>(it - classes.begin());
}

void ConfusionMatrix::add(const std::string& gold, const std::string& predicted, std::size_t n) {
    counts[index_of(gold)][index_of(predicted)] += n;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
    return t;
}

std::vector<Prf> per_class_prf(const ConfusionMatrix& matrix) {
    const auto n = matrix.classes.size();
    std::vector<Prf> out(n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto tp = static_cast<double>(matrix.counts[c][c]);
        double predicted = 0.0, gold = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            predicted += static_cast<double>(matrix.counts[k][c]);
            gold += static_cast<double>(matrix.counts[c][k]);
        }
        auto& p = out[c];
        p.precision = predicted > 0.0 ? tp / predicted : 0.0;
        p.recall = gold > 0.0 ? tp / gold : 0.0;
        p.f1 = p.precision + p.recall > 0.0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
    }
    return out;
}

Prf prf(const ConfusionMatrix& matrix, Averaging averaging) {
    const auto total = matrix.total();
    if (total == 0) fail(ErrorKind::EmptyMatrix, "confusion matrix has no counts");
    const auto per_class = per_class_prf(matrix);
    Prf out;
    const auto n = per_class.size();
    for (std::size_t c = 0; c < n; ++c) {
        double w = 1.0 / static_cast<double>(n);
        if (averaging == Averaging::weighted) {
            const auto support = std::accumulate(matrix.counts[c].begin(), matrix.counts[c].end(), std::size_t{0});
            w = static_cast<double>(support) / static_cast<double>(total);
        }
        out.precision += w * per_class[c].precision;
        out.recall += w * per_class[c].recall;
        out.f1 += w * per_class[c].f1;
    }
    return out;
}

double auc(std::span<const double> positives, std::span<const double> negatives) {
    if (positives.empty() || negatives.empty()) fail(ErrorKind::EmptyInput, "auc needs positives and negatives");
    // Counted in halves so the sum stays an exact integer.
    std::size_t halves = 0;
    for (double p : positives) {
        for (double n : negatives) {
            if (p > n) halves += 2;
            else if (p == n) halves += 1;
        }
    }
    return static_cast<double>(halves) / (2.0 * static_cast<double>(positives.size() * negatives.size()));
}

std::vector<double> average_ranks(std::span<const double> values) {
    const auto n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorKind::KeyMismatch, "correlation inputs differ in length");
    if (x.size() < 2) fail(ErrorKind::DegenerateInput, "correlation needs at least two points");
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
    };
    if (constant(x) || constant(y)) fail(ErrorKind::DegenerateInput, "correlation input is constant");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double kendall(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto n = x.size();
    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0) ++ties_x;
            if (dy == 0.0) ++ties_y;
            if (dx == 0.0 || dy == 0.0) continue;
            if ((dx > 0) == (dy > 0)) ++concordant;
            else ++discordant;
        }
    }
    const auto n0 = static_cast<long long>(n * (n - 1) / 2);
    const double denom = std::sqrt(static_cast<double>(n0 - ties_x) * static_cast<double>(n0 - ties_y));
    return std::clamp(static_cast<double>(concordant - discordant) / denom, -1.0, 1.0);
}

SystemRanking rank_systems(const std::map<std::string, double>& metric_values, std::string metric_name) {
    if (metric_values.size() < 2) fail(ErrorKind::TooFewSystems, "ranking needs at least two systems");
    std::vector<double> negated;
    negated.reserve(metric_values.size());
    for (const auto& [_, v] : metric_values) negated.push_back(-v);
    const auto ranks = average_ranks(negated);
    SystemRanking out{std::move(metric_name), {}};
    std::size_t i = 0;
    for (const auto& [system, _] : metric_values) out.ranks[system] = ranks[i++];
    return out;
}

CorrelationResult correlate_rankings(const std::map<std::string, double>& auto_metric,
                                     const std::map<std::string, double>& reference_metric) {
    if (auto_metric.size() != reference_metric.size() ||
        !std::equal(auto_metric.begin(), auto_metric.end(), reference_metric.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; })) {
        fail(ErrorKind::KeyMismatch, "ranked metrics cover different systems");
    }
    const auto ra = rank_systems(auto_metric);
    const auto rb = rank_systems(reference_metric);
    std::vector<double> x, y;
    for (const auto& [system, r] : ra.ranks) {
        x.push_back(r);
        y.push_back(rb.ranks.at(system));
    }
    return {spearman(x, y), kendall(x, y), x.size()};
}

}  // namespace bioace::stats
