#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "bioace/core/types.hpp"
#include "bioace/stats/report.hpp"

namespace bioace::pipeline::detail {

/// Answers ordered by (question id, system id).
inline std::vector<const core::Answer*> sorted_answers(const core::Corpus& corpus) {
    std::vector<const core::Answer*> out;
    for (const auto& a : corpus.answers) out.push_back(&a);
    std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
        return std::tie(a->question_id, a->system_id) < std::tie(b->question_id, b->system_id);
    });
    return out;
}

/// Running means keyed by name, emitted in key order.
class MeanTable {
public:
    void add(const std::string& key, const std::string& metric, double value) {
        auto& cell = cells_[key][metric];
        cell.first += value;
        cell.second += 1;
    }

    nlohmann::json to_json() const {
        auto out = nlohmann::json::object();
        for (const auto& [key, metrics] : cells_) {
            auto& obj = out[key] = nlohmann::json::object();
            for (const auto& [metric, cell] : metrics) obj[metric] = stats::real(cell.first / cell.second);
        }
        return out;
    }

    void append_summary(std::vector<stats::SummaryRow>& rows) const {
        for (const auto& [key, metrics] : cells_) {
            for (const auto& [metric, cell] : metrics) rows.push_back({key, metric, cell.first / cell.second});
        }
    }

private:
    std::map<std::string, std::map<std::string, std::pair<double, double>>> cells_;
};

}  // namespace bioace::pipeline::detail
