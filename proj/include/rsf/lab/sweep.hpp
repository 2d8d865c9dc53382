#pragma once

#include "rsf/lab/environment.hpp"
#include "rsf/lab/report.hpp"
#include "rsf/rewards.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace rsf::lab {

enum class FeatureFamily { kOptimal, kLaplacian, kPSymmetrized, kRandom };
std::string_view to_string(FeatureFamily f);
FeatureFamily feature_family_from_string(std::string_view name);
std::vector<FeatureFamily> all_families();

struct SweepParams {
  double gamma = 0.9;
  double temperature = 64.0;
  std::vector<Index> dims{0, 1, 2, 4, 8};
  RewardModel model;
  Index n_mc = 2000;
  std::uint64_t seed = 0;
};

// One row per (family, d), with check_id "sweep/<family>":
//   exact      expected gain from the trace formula
//   predicted  E_r[G^pi0], the reference-policy baseline
//   mc_mean    Monte-Carlo gain of the full pipeline, with mc_se
//   pass       the optimal family is not beaten (1e-8 slack)
// d = 0 means no features, so the deployed policy is pi0 and the gain is 0.
std::vector<ReportRow> sweep_features(const Environment& env, const SweepParams& params);

}  // namespace rsf::lab
