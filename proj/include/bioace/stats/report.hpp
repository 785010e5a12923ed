#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bioace::stats {

struct SummaryRow {
    std::string system;
    std::string metric;
    double value = 0.0;
};

struct PlotRow {
    std::string metric;
    std::optional<std::size_t> k;
    std::string system;
    double value = 0.0;
};

struct EvalReport {
    nlohmann::json results = nlohmann::json::object();
    std::vector<SummaryRow> summary;
    std::vector<PlotRow> plot;
};

/// JSON number text with 17 significant digits; non-finite values become null.
nlohmann::json real(double v);

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string plot_csv(const std::vector<PlotRow>& rows);
std::string report_json(const EvalReport& report);

/// Writes report.json, summary.csv and plotdata.csv into dir. Throws IoError.
void emit_report(const EvalReport& report, const std::filesystem::path& dir);

/// Inverse of report_json (summary and plot rows are embedded in report.json).
EvalReport parse_report(const std::string& json_text);

}  // namespace bioace::stats
