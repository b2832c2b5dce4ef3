#pragma once

// CSV / JSON / SVG persistence of scan reports and plain result tables.

#include <filesystem>
#include <string>
#include <vector>

#include "rlab/scan.hpp"

namespace rlab {

enum class ReportFormat { csv, json, svg };
ReportFormat parse_format(const std::string& name);

/// Header plus one line per row, full double precision. Throws on an empty report.
std::string report_csv(const ScanReport& r);
/// Everything in the report, including the config echo and fit.
std::string report_json(const ScanReport& r);
ScanReport report_from_json(const std::string& text);
/// Log-log plot of ratio against N with the fitted line.
std::string report_svg(const ScanReport& r);

/// "<kind>_<family>_s<seed>_<config hash>"
std::string report_stem(const ScanReport& r);

/// Writes one file per format into dir (created if missing); returns the paths.
std::vector<std::filesystem::path> emit_report(const ScanReport& r, const std::filesystem::path& dir,
                                               const std::vector<ReportFormat>& formats = {ReportFormat::csv, ReportFormat::json,
                                                                                          ReportFormat::svg});

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

std::string table_csv(const Table& t);
/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Throws std::runtime_error naming the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rlab
