#pragma once

// The advantage kernel of the reference policy: the symmetric PSD matrix K
// with r^T K r = ||A_r^{pi0}||^2_{L2(rho)}, its self-adjoint companion
// rho_hat^{-1} K, and the closed forms available in deterministic
// environments.

#include "rsf/geometry.hpp"
#include "rsf/mdp.hpp"

#include <optional>

namespace rsf {

class AdvantageKernel {
 public:
  static constexpr double kSymmetryTol = 1e-10;
  static constexpr double kPsdTol = -1e-9;

  AdvantageKernel(Matrix kernel, StateActionWeights weights, double gamma, bool deterministic_env);

  const Matrix& kernel() const { return kernel_; }
  /// rho_hat^{-1} K
  const Matrix& selfadjoint_form() const { return selfadjoint_; }
  const StateActionWeights& weights() const { return weights_; }
  double gamma() const { return gamma_; }
  bool deterministic_env() const { return deterministic_env_; }
  Index size() const { return kernel_.rows(); }

 private:
  Matrix kernel_;
  Matrix selfadjoint_;
  StateActionWeights weights_;
  double gamma_;
  bool deterministic_env_;
};

/// K = (Delta^{-1})^T (rho_hat - pi0^T rho_S_hat pi0) Delta^{-1}, symmetrized.
/// Requires gamma < 1; the gamma = 1 kernel is only available through
/// closed_form_operator on deterministic environments.
AdvantageKernel build_kernel(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma);

/// r^T K r
double kernel_quadratic(const AdvantageKernel& k, const StateActionFn& r);
/// r1^T K r2, the correlation of the two advantage functions.
double kernel_quadratic_pair(const AdvantageKernel& k, const StateActionFn& r1, const StateActionFn& r2);

/// Operator B with r^T K r = <r, B r>_{L2(rho)} in a deterministic environment:
///   gamma = 0:      Id - P* P
///   0 < gamma < 1:  gamma^{-2} (D + D* - Id - (1 - gamma^2) D* D),  D = Delta^{-1}
///   gamma = 1:      D + D* - Id on L2_0(rho) (D the centered inverse; constants map to 0)
/// Throws DomainError on stochastic environments.
RhoOperator closed_form_operator(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma);

/// D + D* - C for the gamma = 1 Laplacian of any ergodic chain, with D the
/// inverse on L2_0(rho) and C the centering projector. No determinism check.
RhoOperator inverse_symmetrized_operator(const Matrix& p_pi0, const StateActionWeights& w);

/// <r, D* (Id - P* P) D r>_{L2(rho)}, D = Delta^{-1}; deterministic environments, gamma < 1.
double alt_form_quadratic(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma,
                          const StateActionFn& r);
RhoOperator alt_form_operator(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma);

struct NormIdentities {
  double advantage;    // ||f||_A^2
  double first;        // ||f||^2 - ||P f||^2
  std::optional<double> second;  // gamma^{-2}(2<f,Delta f> - ||Delta f||^2 - (1-gamma^2)||f||^2), gamma > 0
};

/// The three expressions of ||f||_A^2 that coincide in deterministic environments.
NormIdentities advantage_norm_identities(const StateActionFn& f, const Mdp& mdp, const Policy& pi0,
                                 const StateActionWeights& w, double gamma);

/// (||f||^2 - ||P f||^2) - ||f||_A^2 without the determinism requirement. It
/// equals the expected conditional variance of the next-state value and is
/// strictly positive for generic f in a stochastic environment.
double norm_identity_gap(const StateActionFn& f, const Mdp& mdp, const Policy& pi0, const StateActionWeights& w);

}  // namespace rsf
