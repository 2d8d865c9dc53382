#pragma once

// Regularized successor features: psi = (Id - gamma P_pi0)^{-1} phi computed
// under the reference policy, linear task vectors, the estimated Q-function,
// Boltzmann tilts of pi0 and exact KL-regularized returns.

#include "rsf/feature_set.hpp"
#include "rsf/mdp.hpp"
#include "rsf/rewards.hpp"
#include "rsf/types.hpp"

namespace rsf {

struct SuccessorFeatures {
  Matrix psi;         // (S*A) x d
  Matrix covariance;  // phi^T rho_hat phi
  double gamma = 0.0;

  Index dim() const { return psi.cols(); }
};

inline constexpr double kMinTemperature = 1e-6;

/// Columns solve psi_i = phi_i + gamma P_pi0 psi_i. Requires gamma < 1.
/// Throws NumericalError if the Bellman residual exceeds 1e-9 ||phi||_inf.
SuccessorFeatures successor_feature_map(const FeatureSet& features, const Mdp& mdp, const Policy& pi0);

/// Largest column-wise |psi - phi - gamma P_pi0 psi|_inf / ||phi_i||_inf.
double bellman_residual(const SuccessorFeatures& sf, const FeatureSet& features, const Mdp& mdp, const Policy& pi0);

/// z = phi^T rho_hat r.
Vector task_vector(const FeatureSet& features, const StateActionFn& reward);

/// Same, read off the sample's structure when it has one: phi(s*, a*) for a
/// goal, sum_i w_i phi(s_i, a_i) for scattered points.
Vector task_vector(const FeatureSet& features, const RewardSample& sample);

/// Q_hat = psi z.
StateActionFn q_estimate(const SuccessorFeatures& sf, const Vector& z);

/// pi(a|s) proportional to pi0(a|s) exp(f(s,a)/T), computed with per-state
/// max subtraction. Rows where f is constant reproduce pi0 exactly.
Policy boltzmann_policy(const Policy& pi0, const StateActionFn& f, double temperature);

/// K(s) = T sum_a pi(a|s) ln(pi(a|s)/pi0(a|s)). Throws DomainError when pi
/// puts mass where pi0 has none.
Vector kl_penalty(const Policy& pi, const Policy& pi0, double temperature);

/// T KL(Bolt_pi0(f)(s) || pi0(s)) per state, evaluated from the tilt itself.
/// Agrees with kl_penalty(boltzmann_policy(pi0, f, T), pi0, T) but keeps
/// relative accuracy when f/T is small, where the probability-based sum
/// cancels down to rounding noise.
Vector boltzmann_kl_penalty(const Policy& pi0, const StateActionFn& f, double temperature);

struct RegularizedReturn {
  double value = 0.0;        // unpenalized - penalty
  double unpenalized = 0.0;  // E_{s~rho_S}[V_r^pi(s)]
  double penalty = 0.0;      // discounted KL cost, >= 0
  double temperature = 0.0;
};

/// G_r^pi = E_{s0~rho_S, a0~pi}[sum_t gamma^t (r(s_t,a_t) - K(s_t))], solved exactly.
RegularizedReturn regularized_return(const Mdp& mdp, const Policy& pi0, const Policy& pi, const StateActionFn& reward,
                                     double temperature, const StateActionWeights& w);

/// Same, with the per-state penalty K(s) supplied by the caller.
RegularizedReturn regularized_return(const Mdp& mdp, const Policy& pi, const StateActionFn& reward,
                                     const Vector& penalty, double temperature, const StateActionWeights& w);

/// G_r^pi for pi = Bolt_pi0(f), with the penalty from boltzmann_kl_penalty.
RegularizedReturn tilted_return(const Mdp& mdp, const Policy& pi0, const StateActionFn& f,
                                const StateActionFn& reward, double temperature, const StateActionWeights& w);

/// G^pi0 + (||Q||_A^2 - ||Q_hat - Q||_A^2) / (2 T (1 - gamma)).
double first_order_prediction(const StateActionFn& q_true, const StateActionFn& q_hat, double g_pi0, double temperature,
                           double gamma, const StateActionWeights& w, const Policy& pi0);

/// The deployed policy Bolt_pi0(psi z) for one reward.
struct RsfPolicy {
  Vector z;
  StateActionFn q_hat;
  Policy policy;
};
RsfPolicy rsf_policy(const FeatureSet& features, const SuccessorFeatures& sf, const RewardSample& sample,
                     const Policy& pi0, double temperature);

}  // namespace rsf
