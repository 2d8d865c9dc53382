#pragma once

#include "rsf/lab/environment.hpp"
#include "rsf/lab/report.hpp"
#include "rsf/lab/verify.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace rsf::lab {

struct SuiteConfig {
  std::vector<EnvironmentSpec> environments;
  VerifyParams params;
  std::vector<CheckId> checks = all_checks();
};

/// Three environments with softmax reference policies: a 4x4 deterministic
/// gridworld, a 6-state directed cycle and an 8-state, 3-action random
/// stochastic MDP, over the default parameter grid.
SuiteConfig default_suite(std::uint64_t seed = 0);

nlohmann::json params_to_json(const VerifyParams& p);
/// Missing keys keep their defaults.
VerifyParams params_from_json(const nlohmann::json& j);
nlohmann::json suite_to_json(const SuiteConfig& c);
SuiteConfig suite_from_json(const nlohmann::json& j);
SuiteConfig load_suite(const std::filesystem::path& path);

struct SkippedCell {
  CheckId check;
  std::string env;
  std::string reason;
};

struct SuiteResult {
  std::vector<ReportRow> rows;  // sorted
  std::vector<SkippedCell> skipped;
  bool all_pass() const;
};

/// Every (check, environment) cell. Cells whose hypotheses the environment
/// does not meet are listed in `skipped` instead of producing rows.
SuiteResult run_suite(const SuiteConfig& config);

/// Total rows run_suite() will produce for `config`.
std::size_t suite_row_count(const SuiteConfig& config);

}  // namespace rsf::lab
