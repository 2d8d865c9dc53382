#pragma once

#include "rsf/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace rsf::lab {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// One check result. Missing numeric fields are NaN (rendered empty in CSV,
/// null in JSON); d is -1 when the check has no feature count.
struct ReportRow {
  std::string check_id;
  std::string env;
  std::uint64_t seed = 0;
  double gamma = kMissing;
  double temperature = kMissing;
  Index d = -1;
  std::string model;
  double exact = kMissing;
  double predicted = kMissing;
  double mc_mean = kMissing;
  double mc_se = kMissing;
  bool pass = false;
  double runtime_ms = 0.0;
};

enum class ReportFormat { kCsv, kJson };
ReportFormat format_from_string(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "check_id,env,seed,gamma,T,d,model,exact,predicted,mc_mean,mc_se,pass,runtime_ms";

/// 12 significant digits; empty for NaN.
std::string format_number(double x);

/// Orders rows by (check_id, env, seed, gamma, T, d, model).
void sort_rows(std::vector<ReportRow>& rows);

std::string render_csv(const std::vector<ReportRow>& rows);
nlohmann::json rows_to_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> rows_from_json(const nlohmann::json& j);

/// Writes rows to `path`. Throws DomainError on empty input and
/// std::runtime_error when the file cannot be written.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::filesystem::path& path);

}  // namespace rsf::lab
