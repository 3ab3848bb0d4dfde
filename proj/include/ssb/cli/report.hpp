#ifndef SSB_CLI_REPORT_HPP
#define SSB_CLI_REPORT_HPP

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssb/errors.hpp"

namespace ssb::cli {

enum class Format { csv, records };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "records") return Format::records;
    throw config_error("unknown output format '" + s + "' (expected csv or records)");
}

/// Tabular report: ordered columns, rows of JSON scalars, and a summary
/// object. CSV writes the summary as trailing `# key=value` lines; records
/// writes one JSON object per row followed by {"summary": {...}}.
class Report {
public:
    explicit Report(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(nlohmann::ordered_json row) {
        for (const auto& c : columns_)
            if (!row.contains(c)) throw error("report row is missing column '" + c + "'");
        rows_.push_back(std::move(row));
    }

    nlohmann::ordered_json& summary() { return summary_; }
    const nlohmann::ordered_json& summary() const { return summary_; }
    const std::vector<nlohmann::ordered_json>& rows() const { return rows_; }

    void write(std::ostream& os, Format f) const {
        if (f == Format::records) {
            for (const auto& r : rows_) os << r.dump() << '\n';
            if (!summary_.empty()) os << nlohmann::ordered_json{{"summary", summary_}}.dump() << '\n';
            return;
        }
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << cell(r[columns_[i]]);
            os << '\n';
        }
        for (const auto& [k, v] : summary_.items()) os << "# " << k << '=' << cell(v) << '\n';
    }

    static std::string cell(const nlohmann::ordered_json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_float()) {
            std::ostringstream ss;
            ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v.get<double>();
            return ss.str();
        }
        if (v.is_null()) return "";
        return v.dump();
    }

private:
    std::vector<std::string> columns_;
    std::vector<nlohmann::ordered_json> rows_;
    nlohmann::ordered_json summary_ = nlohmann::ordered_json::object();
};

} // namespace ssb::cli

#endif // SSB_CLI_REPORT_HPP
