#include "rlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rlab/error.hpp"

namespace rlab {

using nlohmann::json;

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "svg") return ReportFormat::svg;
  throw ValidationError("unknown report format '" + name + "' (expected csv, json or svg)");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void require_rows(const ScanReport& r) {
  if (r.rows.empty()) throw ValidationError("nothing to report");
}

}  // namespace

std::string report_csv(const ScanReport& r) {
  require_rows(r);
  std::string out = "N,lhs,rhs,ratio,lhs_std_error\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.N) + "," + format_double(row.lhs) + "," + format_double(row.rhs) + "," + format_double(row.ratio) + "," +
           format_double(row.lhs_std_error) + "\n";
  return out;
}

std::string report_json(const ScanReport& r) {
  require_rows(r);
  json j;
  j["kind"] = r.kind;
  j["family"] = family_name(r.family);
  j["seed"] = r.seed;
  j["config"] = json::parse(config_to_json(r.config));
  j["config_hash"] = config_hash(r.config);
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"N", row.N}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"ratio", row.ratio}, {"lhs_std_error", row.lhs_std_error}});
  j["rows"] = rows;
  json fit = json::object();
  if (!r.fit.points.empty()) {
    fit["slope"] = r.fit.slope;
    fit["intercept"] = r.fit.intercept;
    fit["residual"] = r.fit.residual;
    json pts = json::array();
    for (const auto& [x, y] : r.fit.points) pts.push_back({x, y});
    fit["points"] = pts;
    fit["slack"] = r.fit.slope - r.theory_slope;
  }
  j["fit"] = fit;
  j["theory_slope"] = r.theory_slope;
  j["wall_clock_s"] = r.wall_clock_s;
  j["note"] = r.note;
  j["p_thresholds"] = {{"theorem1_and_decoupling", 2.0 * r.config.d + 2.0},
                       {"algebraic_case", 2.0 * (r.config.d + 2.0)},
                       {"note", "the algebraic-case estimate is stated for p >= 2(d+2), the main theorem for p >= 2(d+1)"}};
  return j.dump(2);
}

ScanReport report_from_json(const std::string& text) {
  ScanReport r;
  try {
    const json j = json::parse(text);
    r.kind = j.at("kind").get<std::string>();
    r.family = parse_family(j.at("family").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = parse_config(j.at("config").dump());
    for (const auto& row : j.at("rows"))
      r.rows.push_back({row.at("N").get<int>(), row.at("lhs").get<double>(), row.at("rhs").get<double>(), row.at("ratio").get<double>(),
                        row.at("lhs_std_error").get<double>()});
    const json& fit = j.at("fit");
    if (fit.contains("slope")) {
      r.fit.slope = fit.at("slope").get<double>();
      r.fit.intercept = fit.at("intercept").get<double>();
      r.fit.residual = fit.at("residual").get<double>();
      for (const auto& pt : fit.at("points")) r.fit.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    }
    r.theory_slope = j.at("theory_slope").get<double>();
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
    r.note = j.at("note").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("report: malformed JSON: ") + e.what());
  }
  return r;
}

std::string report_svg(const ScanReport& r) {
  require_rows(r);
  const double W = 480, H = 360, m = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& row : r.rows) {
    if (!(row.ratio > 0.0)) continue;
    x0 = std::min(x0, std::log2(row.N));
    x1 = std::max(x1, std::log2(row.N));
    y0 = std::min(y0, std::log2(row.ratio));
    y1 = std::max(y1, std::log2(row.ratio));
  }
  if (x1 <= x0) { x0 -= 1; x1 += 1; }
  if (y1 <= y0) { y0 -= 1; y1 += 1; }
  auto px = [&](double lx) { return m + (lx - x0) / (x1 - x0) * (W - 2 * m); };
  auto py = [&](double ly) { return H - m - (ly - y0) / (y1 - y0) * (H - 2 * m); };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">log2 N</text>\n";
  s << "<text x=\"14\" y=\"" << H / 2 << "\" transform=\"rotate(-90 14 " << H / 2 << ")\" text-anchor=\"middle\">log2 ratio</text>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\">" << r.kind << " / " << family_name(r.family) << "</text>\n";
  for (const auto& row : r.rows)
    if (row.ratio > 0.0)
      s << "<circle cx=\"" << px(std::log2(row.N)) << "\" cy=\"" << py(std::log2(row.ratio)) << "\" r=\"4\" fill=\"steelblue\"/>\n";
  if (!r.fit.points.empty()) {
    // log2 ratio = intercept / ln 2 + slope log2 N
    auto fy = [&](double lx) { return r.fit.intercept / std::log(2.0) + r.fit.slope * lx; };
    s << "<line x1=\"" << px(x0) << "\" y1=\"" << py(fy(x0)) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(fy(x1))
      << "\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>\n";
    s << "<text x=\"" << W - m << "\" y=\"" << m << "\" text-anchor=\"end\">slope " << format_double(std::round(r.fit.slope * 1000) / 1000)
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string report_stem(const ScanReport& r) {
  return r.kind + "_" + family_name(r.family) + "_s" + std::to_string(r.seed) + "_" + config_hash(r.config);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::filesystem::path> emit_report(const ScanReport& r, const std::filesystem::path& dir, const std::vector<ReportFormat>& formats) {
  require_rows(r);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> out;
  for (auto f : formats) {
    const char* ext = f == ReportFormat::csv ? ".csv" : f == ReportFormat::json ? ".json" : ".svg";
    const auto path = dir / (report_stem(r) + ext);
    write_text_file(path, f == ReportFormat::csv ? report_csv(r) : f == ReportFormat::json ? report_json(r) : report_svg(r));
    out.push_back(path);
  }
  return out;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw ValidationError("table row has the wrong number of cells");
  rows.push_back(std::move(row));
}

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + row[k];
    out += "\n";
  }
  return out;
}

}  // namespace rlab
