#include "rsf/lab/sweep.hpp"

#include "rsf/advantage_kernel.hpp"
#include "rsf/features.hpp"
#include "rsf/lab/stats.hpp"
#include "rsf/lab/verify.hpp"
#include "rsf/successor_features.hpp"

#include <array>
#include <chrono>
#include <map>

namespace rsf::lab {

namespace {
constexpr std::array<std::string_view, 4> kFamilyNames{"optimal", "laplacian_eigs", "p_symmetrized", "random"};
}

std::string_view to_string(FeatureFamily f) { return kFamilyNames[static_cast<std::size_t>(f)]; }

FeatureFamily feature_family_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (name == kFamilyNames[i]) return static_cast<FeatureFamily>(i);
  }
  if (name == "laplacian") return FeatureFamily::kLaplacian;
  throw DomainError("unknown feature family: " + std::string(name));
}

std::vector<FeatureFamily> all_families() {
  return {FeatureFamily::kOptimal, FeatureFamily::kLaplacian, FeatureFamily::kPSymmetrized, FeatureFamily::kRandom};
}

std::vector<ReportRow> sweep_features(const Environment& base, const SweepParams& p) {
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw DomainError("sweep: gamma must lie in [0, 1)");
  if (!(p.temperature >= kMinTemperature)) throw DomainError("sweep: temperature must be at least 1e-6");
  if (p.n_mc < 2) throw DomainError("sweep: n_mc must be at least 2");
  p.model.validate();

  Environment env = base;
  env.mdp = base.mdp.with_gamma(p.gamma);
  env.spec.gamma = p.gamma;
  const StateActionWeights& w = env.weights;
  const AdvantageKernel kernel = build_kernel(env.mdp, env.pi0, w, p.gamma);
  const double baseline = expected_baseline_return(p.model, w, p.gamma);

  // All families see the same rewards, so Monte-Carlo differences between
  // families are paired.
  Rng reward_rng = cell_rng(p.seed, 0x5eedull);
  std::vector<RewardSample> rewards;
  std::vector<double> g0;
  rewards.reserve(static_cast<std::size_t>(p.n_mc));
  for (Index i = 0; i < p.n_mc; ++i) {
    rewards.push_back(sample_reward(p.model, w, reward_rng));
    g0.push_back(w.rho().dot(rewards.back().reward) / (1.0 - p.gamma));
  }

  std::vector<ReportRow> rows;
  std::map<Index, double> optimal_gain;
  for (Index d : p.dims) {
    if (d < 0 || d > w.size()) throw DomainError("sweep: d must lie in [0, S*A]");
    for (FeatureFamily family : all_families()) {
      const auto start = std::chrono::steady_clock::now();
      ReportRow row;
      row.check_id = "sweep/" + std::string(to_string(family));
      row.env = env_tag(env.spec);
      row.seed = p.seed;
      row.gamma = p.gamma;
      row.temperature = p.temperature;
      row.d = d;
      row.model = p.model.label();
      row.predicted = baseline;
      RunningStats mc;
      if (d == 0) {
        row.exact = 0.0;
        for (Index i = 0; i < p.n_mc; ++i) mc.add(0.0);
      } else {
        Rng rng = cell_rng(p.seed, static_cast<std::uint64_t>(d) * 16 + static_cast<std::uint64_t>(family));
        FeatureSet fs = family == FeatureFamily::kOptimal ? optimal_features(kernel, d)
                        : family == FeatureFamily::kLaplacian
                            ? baseline_features(BaselineKind::kLaplacian, env.mdp, env.pi0, w, d, rng)
                        : family == FeatureFamily::kPSymmetrized
                            ? baseline_features(BaselineKind::kPSymmetrized, env.mdp, env.pi0, w, d, rng)
                            : random_features(w, d, rng);
        row.exact = expected_gain(fs, kernel, p.model, p.temperature);
        const SuccessorFeatures sf = successor_feature_map(fs, env.mdp, env.pi0);
        for (Index i = 0; i < p.n_mc; ++i) {
          const auto& s = rewards[static_cast<std::size_t>(i)];
          const StateActionFn q_hat = q_estimate(sf, task_vector(fs, s));
          mc.add(tilted_return(env.mdp, env.pi0, q_hat, s.reward, p.temperature, w).value -
                 g0[static_cast<std::size_t>(i)]);
        }
      }
      if (family == FeatureFamily::kOptimal) optimal_gain[d] = row.exact;
      row.mc_mean = mc.mean();
      row.mc_se = mc.standard_error();
      row.pass = row.exact <= optimal_gain[d] + 1e-8 * std::max(1.0, std::abs(optimal_gain[d]));
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      rows.push_back(std::move(row));
    }
  }
  sort_rows(rows);
  return rows;
}

}  // namespace rsf::lab
