#include "bioace/stats/report.hpp"

#include <cmath>
#include <fstream>

#include "bioace/error.hpp"
#include "bioace/util/text.hpp"

namespace bioace::stats {

using nlohmann::json;

json real(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    out << content;
    if (!out.flush()) fail(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "system,metric,value\n";
    for (const auto& r : rows) out += csv_field(r.system) + "," + csv_field(r.metric) + "," + text::format_real(r.value) + "\n";
    return out;
}

std::string plot_csv(const std::vector<PlotRow>& rows) {
    std::string out = "metric,k,system,value\n";
    for (const auto& r : rows) {
        out += csv_field(r.metric) + "," + (r.k ? std::to_string(*r.k) : std::string()) + "," + csv_field(r.system) +
               "," + text::format_real(r.value) + "\n";
    }
    return out;
}

std::string report_json(const EvalReport& report) {
    json summary = json::array();
    for (const auto& r : report.summary) summary.push_back({{"system", r.system}, {"metric", r.metric}, {"value", real(r.value)}});
    json plot = json::array();
    for (const auto& r : report.plot) {
        plot.push_back({{"metric", r.metric},
                        {"k", r.k ? json(*r.k) : json(nullptr)},
                        {"system", r.system},
                        {"value", real(r.value)}});
    }
    const json doc{{"results", report.results}, {"summary", summary}, {"plotdata", plot}};
    return doc.dump(2) + "\n";
}

void emit_report(const EvalReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "report.json", report_json(report));
    write_file(dir / "summary.csv", summary_csv(report.summary));
    write_file(dir / "plotdata.csv", plot_csv(report.plot));
}

EvalReport parse_report(const std::string& json_text) {
    EvalReport report;
    try {
        const auto doc = json::parse(json_text);
        report.results = doc.at("results");
        for (const auto& r : doc.at("summary")) {
            report.summary.push_back({r.at("system").get<std::string>(), r.at("metric").get<std::string>(),
                                      r.at("value").is_null() ? NAN : r.at("value").get<double>()});
        }
        for (const auto& r : doc.at("plotdata")) {
            PlotRow row{r.at("metric").get<std::string>(), std::nullopt, r.at("system").get<std::string>(),
                        r.at("value").is_null() ? NAN : r.at("value").get<double>()};
            if (!r.at("k").is_null()) row.k = r.at("k").get<std::size_t>();
            report.plot.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::MalformedRecord, std::string("not a report document: ") + e.what());
    }
    return report;
}

}  // namespace bioace::stats
