#pragma once

// Numerical verification suite. Each check turns one closed-form statement
// about successor features into report rows with exact values, predictions,
// Monte-Carlo estimates where applicable, and a pass flag.
//
//   V1  expected Bellman-gap norm equals S*A - d for every feature set
//   V2  G_exact - first-order prediction decays like 1/T^2
//   V3  expected RSF gain: trace formula vs second moments vs Monte Carlo
//   V4  optimal features dominate every competitor in trace gain
//   V5  closed-form operators and their eigenspaces (deterministic only)
//   V6  the three advantage-norm expressions coincide (deterministic only)
//   V7  second moments of the reward models
//   V8  the advantage kernel annihilates constants
//   V9  the resolvent-sandwich form equals the closed form (deterministic only)

#include "rsf/lab/environment.hpp"
#include "rsf/lab/report.hpp"
#include "rsf/errors.hpp"
#include "rsf/rewards.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rsf::lab {

enum class CheckId { V1, V2, V3, V4, V5, V6, V7, V8, V9 };
std::string_view to_string(CheckId c);
CheckId check_from_string(std::string_view name);
std::vector<CheckId> all_checks();
/// "V1,V3,V5-V7" style lists.
std::vector<CheckId> parse_check_list(std::string_view list);

/// A check requested on an environment that does not meet its hypotheses.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct VerifyParams {
  std::vector<double> gammas{0.001, 0.5, 0.9, 0.999};
  std::vector<double> temperatures{16, 64, 256, 1024, 4096};
  std::vector<Index> dims{1, 2, 4, 8};
  std::vector<RewardModel> models{RewardModel::gaussian(), RewardModel::goal(), RewardModel::scattered(3.0, 1.0, 1.0)};
  Index n_mc = 10000;          // rewards per Monte-Carlo estimate (V1, V3)
  Index n_moment = 20000;      // samples for second moments (V7)
  Index n_feature_sets = 5;    // random feature sets per V1 cell
  Index n_functions = 100;     // random test functions (V5, V6, V9)
  Index n_competitors = 100;   // random competitors per V4 cell
  Index n_fit = 50;            // rewards averaged in the V3 decay fit
  // V3 Monte-Carlo temperature, in units of the model's advantage scale.
  double mc_temperature_factor = 1e6;
  std::uint64_t seed = 0;
};

/// Empty when `check` can run on `env`; otherwise the reason it cannot.
std::string inapplicable_reason(CheckId check, const Environment& env);

/// Runs one check on one environment over the parameter grid. Throws
/// ConfigError when the environment violates the check's hypotheses.
std::vector<ReportRow> verify(CheckId check, const EnvironmentSpec& spec, const VerifyParams& params);
std::vector<ReportRow> verify(CheckId check, const Environment& env, const VerifyParams& params);

/// Rows that verify() produces for (check, env, params), without running it.
std::size_t expected_row_count(CheckId check, const Environment& env, const VerifyParams& params);

/// Row label for an environment: "<label>@<seed>".
std::string env_tag(const EnvironmentSpec& spec);

}  // namespace rsf::lab
