#pragma once

// Random downstream-task rewards: Gaussian white noise in L2(rho), goal
// reaching (one rho-scaled Dirac), and scattered Poisson rewards.

#include "rsf/mdp.hpp"
#include "rsf/types.hpp"

#include <json.hpp>

#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace rsf {

using Rng = std::mt19937_64;

enum class RewardKind { kGaussian, kGoal, kScattered };
enum class WeightLaw { kNormal, kUniform };

std::string_view to_string(RewardKind k);
RewardKind reward_kind_from_string(std::string_view name);

struct RewardModel {
  RewardKind kind = RewardKind::kGaussian;
  // Scattered model: N ~ Poisson(kappa), weights with mean mu and variance sigma2.
  double kappa = 1.0;
  double mu = 0.0;
  double sigma2 = 1.0;
  WeightLaw weight_law = WeightLaw::kNormal;

  static RewardModel gaussian() { return {}; }
  static RewardModel goal() { return {RewardKind::kGoal}; }
  static RewardModel scattered(double kappa, double mu, double sigma2, WeightLaw law = WeightLaw::kNormal);

  /// Throws DomainError unless kappa > 0 (scattered) and sigma2 >= 0.
  void validate() const;
  std::string label() const;
};

/// {"kind": "gaussian"|"goal"|"scattered", "kappa": k, "mu": m, "sigma2": v, "weight_law": "normal"|"uniform"}
nlohmann::json reward_model_to_json(const RewardModel& m);
RewardModel reward_model_from_json(const nlohmann::json& j);

struct ScatterPoint {
  Index index;   // state-action index
  double weight;
};

struct RewardSample {
  StateActionFn reward;
  std::optional<Index> goal;          // goal model: the (s*, a*) index
  std::vector<ScatterPoint> points;   // scattered model: (s_i, a_i, w_i), i < N
};

/// Draws one reward from `model`. Explicit rng; no global randomness.
RewardSample sample_reward(const RewardModel& model, const StateActionWeights& w, Rng& rng);

/// Sum_{s,a} rho(s,a) r(s,a). Goal samples integrate to exactly 1.
double rho_integral(const RewardSample& sample, const StateActionWeights& w);

/// E[r r^T]: rho_hat^{-1} (gaussian, goal) or
/// kappa (mu^2 + sigma^2) rho_hat^{-1} + (kappa mu)^2 1 1^T (scattered).
Matrix second_moment(const RewardModel& model, const StateActionWeights& w);

/// E[r] under the model.
Vector first_moment(const RewardModel& model, const StateActionWeights& w);

/// E_r[r^T M r] = Tr(M E[r r^T]) for symmetric M.
double expected_quadratic(const Matrix& m, const RewardModel& model, const StateActionWeights& w);

}  // namespace rsf
