// Experiment report assembly and emission: aligned text table, CSV, and
// line-delimited structured records.  Structured output carries no wall-clock
// fields so identical runs emit byte-identical bytes.
#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctxlearn/core.hpp"

namespace ctxlearn::report {

struct Row {
    std::string config;
    std::size_t correct = 0;
    std::size_t total = 0;

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
    // Display percent, rounded to the nearest integer.
    int percent() const { return static_cast<int>(std::lround(100.0 * accuracy())); }
};

struct ExperimentReport {
    std::string title;
    std::uint64_t seed = 0;
    std::string dataset_fingerprint;
    std::string strategy_order = "normalize,expand,weight";
    std::vector<Row> rows;
};

enum class Format { Table, Csv, Records };

inline Format format_from_string(const std::string& text) {
    if (text == "table") return Format::Table;
    if (text == "csv") return Format::Csv;
    if (text == "records") return Format::Records;
    throw Error("unknown report format: '" + text + "'");
}

inline std::string emit_report(const ExperimentReport& report, Format format) {
    std::ostringstream out;
    switch (format) {
        case Format::Table: {
            std::size_t width = 13;
            for (const Row& row : report.rows) width = std::max(width, row.config.size());
            out << report.title << '\n';
            out << "seed=" << report.seed << " fingerprint=" << report.dataset_fingerprint
                << " order=" << report.strategy_order << '\n';
            out << std::left << std::setw(static_cast<int>(width)) << "configuration"
                << std::right << std::setw(9) << "correct" << std::setw(7) << "total"
                << std::setw(9) << "percent" << '\n';
            for (const Row& row : report.rows) {
                out << std::left << std::setw(static_cast<int>(width)) << row.config << std::right
                    << std::setw(9) << row.correct << std::setw(7) << row.total << std::setw(9)
                    << row.percent() << '\n';
            }
            break;
        }
        case Format::Csv: {
            out << "config,correct,total,percent,accuracy\n";
            for (const Row& row : report.rows) {
                nlohmann::json accuracy = row.accuracy();  // shortest round-trip formatting
                out << row.config << ',' << row.correct << ',' << row.total << ',' << row.percent()
                    << ',' << accuracy.dump() << '\n';
            }
            break;
        }
        case Format::Records: {
            nlohmann::json meta{{"record", "metadata"},
                                {"title", report.title},
                                {"seed", report.seed},
                                {"fingerprint", report.dataset_fingerprint},
                                {"strategy_order", report.strategy_order}};
            out << meta.dump() << '\n';
            for (const Row& row : report.rows) {
                nlohmann::json record{{"record", "row"},
                                      {"config", row.config},
                                      {"correct", row.correct},
                                      {"total", row.total},
                                      {"percent", row.percent()},
                                      {"accuracy", row.accuracy()}};
                out << record.dump() << '\n';
            }
            break;
        }
    }
    return out.str();
}

/// Re-parses records output; inverse of emit_report(Format::Records).
inline ExperimentReport parse_records(const std::string& text) {
    ExperimentReport report;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json record = nlohmann::json::parse(line);
        if (record.at("record") == "metadata") {
            report.title = record.at("title").get<std::string>();
            report.seed = record.at("seed").get<std::uint64_t>();
            report.dataset_fingerprint = record.at("fingerprint").get<std::string>();
            report.strategy_order = record.at("strategy_order").get<std::string>();
        } else {
            Row row;
            row.config = record.at("config").get<std::string>();
            row.correct = record.at("correct").get<std::size_t>();
            row.total = record.at("total").get<std::size_t>();
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace ctxlearn::report
