#include "rsf/lab/report.hpp"

#include "rsf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace rsf::lab {

ReportFormat format_from_string(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw DomainError("unknown report format: " + std::string(name));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

// NaN sorts first so that missing parameters do not break the ordering.
double key(double x) { return std::isnan(x) ? -std::numeric_limits<double>::infinity() : x; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::json number_or_null(double x) {
  if (std::isnan(x)) return nullptr;
  // Round-trip through the 12-digit rendering so JSON and CSV agree.
  return std::stod(format_number(x));
}

double number_or_nan(const nlohmann::json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return kMissing;
  return j.at(name).get<double>();
}

}  // namespace

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::make_tuple(a.check_id, a.env, a.seed, key(a.gamma), key(a.temperature), a.d, a.model) <
           std::make_tuple(b.check_id, b.env, b.seed, key(b.gamma), key(b.temperature), b.d, b.model);
  });
}

std::string render_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.check_id) << ',' << csv_field(r.env) << ',' << r.seed << ',' << format_number(r.gamma) << ','
       << format_number(r.temperature) << ',' << (r.d >= 0 ? std::to_string(r.d) : std::string()) << ','
       << csv_field(r.model) << ',' << format_number(r.exact) << ',' << format_number(r.predicted) << ','
       << format_number(r.mc_mean) << ',' << format_number(r.mc_se) << ',' << (r.pass ? "true" : "false") << ','
       << format_number(r.runtime_ms) << '\n';
  }
  return os.str();
}

nlohmann::json rows_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"check_id", r.check_id},
                   {"env", r.env},
                   {"seed", r.seed},
                   {"gamma", number_or_null(r.gamma)},
                   {"T", number_or_null(r.temperature)},
                   {"d", r.d >= 0 ? nlohmann::json(r.d) : nlohmann::json(nullptr)},
                   {"model", r.model},
                   {"exact", number_or_null(r.exact)},
                   {"predicted", number_or_null(r.predicted)},
                   {"mc_mean", number_or_null(r.mc_mean)},
                   {"mc_se", number_or_null(r.mc_se)},
                   {"pass", r.pass},
                   {"runtime_ms", number_or_null(r.runtime_ms)}});
  }
  return out;
}

std::vector<ReportRow> rows_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("rows") : j;
  if (!arr.is_array()) throw DomainError("report JSON must be an array of rows");
  std::vector<ReportRow> rows;
  rows.reserve(arr.size());
  for (const auto& e : arr) {
    ReportRow r;
    r.check_id = e.at("check_id").get<std::string>();
    r.env = e.at("env").get<std::string>();
    r.seed = e.at("seed").get<std::uint64_t>();
    r.gamma = number_or_nan(e, "gamma");
    r.temperature = number_or_nan(e, "T");
    r.d = e.contains("d") && !e.at("d").is_null() ? e.at("d").get<Index>() : -1;
    r.model = e.value("model", std::string());
    r.exact = number_or_nan(e, "exact");
    r.predicted = number_or_nan(e, "predicted");
    r.mc_mean = number_or_nan(e, "mc_mean");
    r.mc_se = number_or_nan(e, "mc_se");
    r.pass = e.at("pass").get<bool>();
    r.runtime_ms = number_or_nan(e, "runtime_ms");
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::filesystem::path& path) {
  if (rows.empty()) throw DomainError("emit_report: no rows to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path.string() + " for writing");
  if (format == ReportFormat::kCsv) {
    out << render_csv(rows);
  } else {
    out << rows_to_json(rows).dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("emit_report: write to " + path.string() + " failed");
}

}  // namespace rsf::lab
