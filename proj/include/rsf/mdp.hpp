#pragma once

// Finite reward-free MDPs, policies, the induced state-action chain and exact
// policy evaluation.

#include "rsf/types.hpp"

#include <cstdint>
#include <utility>

namespace rsf {

class StateActionWeights;

/// Finite reward-free MDP. `transition` is (S*A) x S with rows P(.|s,a).
class Mdp {
 public:
  Mdp(Index num_states, Index num_actions, Matrix transition, double gamma);

  Index num_states() const { return num_states_; }
  Index num_actions() const { return num_actions_; }
  Index size() const { return num_states_ * num_actions_; }
  const Matrix& transition() const { return transition_; }
  double gamma() const { return gamma_; }

  Mdp with_gamma(double gamma) const { return Mdp(num_states_, num_actions_, transition_, gamma); }

 private:
  Index num_states_;
  Index num_actions_;
  Matrix transition_;
  double gamma_;
};

/// Row-stochastic S x A matrix of action probabilities.
class Policy {
 public:
  explicit Policy(Matrix probs);

  static Policy uniform(Index num_states, Index num_actions);

  Index num_states() const { return probs_.rows(); }
  Index num_actions() const { return probs_.cols(); }
  const Matrix& probs() const { return probs_; }
  double operator()(Index s, Index a) const { return probs_(s, a); }

  bool strictly_positive() const { return probs_.minCoeff() > 0.0; }

  /// The S x (S*A) matrix pi_{s,(s',a)} = pi(a|s) [s = s'].
  Matrix as_matrix() const;

 private:
  Matrix probs_;
};

/// Stationary state-action law of the reference chain and its state marginal.
class StateActionWeights {
 public:
  StateActionWeights(Vector rho, Index num_actions);

  const Vector& rho() const { return rho_; }
  const Vector& rho_s() const { return rho_s_; }
  Index size() const { return rho_.size(); }
  Index num_actions() const { return num_actions_; }
  Index num_states() const { return rho_s_.size(); }

  Matrix rho_hat() const { return rho_.asDiagonal(); }
  Matrix rho_s_hat() const { return rho_s_.asDiagonal(); }

 private:
  Vector rho_;
  Vector rho_s_;
  Index num_actions_;
};

enum class ChainVerdict { kErgodic, kReducible, kPeriodic };

const char* to_string(ChainVerdict v);

/// P_pi = P * pi, the (S*A) x (S*A) chain over state-actions.
Matrix policy_transition(const Mdp& mdp, const Policy& policy);

/// Structural check on the support graph: strong connectivity and period 1.
ChainVerdict check_ergodicity(const Matrix& p_pi);

struct StationaryOptions {
  double tol = 1e-12;
  std::int64_t max_iters = 1'000'000;
  double floor = 1e-300;
};

/// Left fixed point of an irreducible chain, by power iteration with a dense
/// eigen-solve fallback when the iteration stalls; converged iterates of up to
/// 2048 states are refined by a bordered linear solve. Reducible chains are
/// rejected; periodic ones are iterated through their lazy version.
StateActionWeights stationary_distribution(const Matrix& p_pi, Index num_actions,
                                           const StationaryOptions& opts = {});

bool is_deterministic(const Mdp& mdp);

/// Solves (Id - gamma P_pi) Q = r for gamma < 1. At gamma = 1 pass the
/// stationary weights of `policy`; the reward must then be rho-centered and
/// the centered solution is returned.
StateActionFn q_function(const Mdp& mdp, const Policy& policy, const StateActionFn& reward,
                         const StateActionWeights* weights = nullptr);

/// V(s) = sum_a pi(a|s) Q(s,a) and A(s,a) = Q(s,a) - V(s).
std::pair<Vector, StateActionFn> value_and_advantage(const Policy& policy, const StateActionFn& q);

}  // namespace rsf
