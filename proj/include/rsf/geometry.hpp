#pragma once

// The L2(rho) geometry of state-action functions: weighted inner products,
// the advantage seminorm, adjoints, the Laplacian Id - gamma P_pi0 and its
// inverse, the Dirichlet form, and rho-orthonormal feature bases.

#include "rsf/feature_set.hpp"
#include "rsf/mdp.hpp"
#include "rsf/types.hpp"

namespace rsf {

/// f^T diag(rho) g.
double l2rho_inner(const StateActionFn& f, const StateActionFn& g, const StateActionWeights& w);
double l2rho_norm_sq(const StateActionFn& f, const StateActionWeights& w);

/// E_rho[(f(s,a) - E_{a'~pi0(s)} f(s,a')) (g(s,a) - E_{a'~pi0(s)} g(s,a'))].
/// The action average always uses the reference policy pi0.
double advantage_inner(const StateActionFn& f, const StateActionFn& g, const StateActionWeights& w, const Policy& pi0);
double advantage_norm_sq(const StateActionFn& f, const StateActionWeights& w, const Policy& pi0);

/// A linear operator on L2(rho) together with the weights that define its adjoint.
class RhoOperator {
 public:
  RhoOperator(Matrix matrix, StateActionWeights weights);

  const Matrix& matrix() const { return matrix_; }
  const StateActionWeights& weights() const { return weights_; }
  Index size() const { return matrix_.rows(); }

  StateActionFn apply(const StateActionFn& f) const { return matrix_ * f; }
  /// <f, M g>_{L2(rho)}
  double form(const StateActionFn& f, const StateActionFn& g) const;

 private:
  Matrix matrix_;
  StateActionWeights weights_;
};

/// M* = rho_hat^{-1} M^T rho_hat.
RhoOperator adjoint(const RhoOperator& m);
Matrix adjoint_matrix(const Matrix& m, const Vector& rho);

/// Delta = Id - gamma P_pi0, for 0 <= gamma <= 1.
RhoOperator laplacian(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma);

/// Q with Delta Q = r. At gamma = 1 the reward must have rho-mean below 1e-10
/// and the rho-centered solution is returned.
StateActionFn apply_inverse_laplacian(const RhoOperator& delta, const StateActionFn& r, double gamma);

/// Matrix of Delta^{-1}. At gamma = 1 this is the inverse on L2_0(rho)
/// composed with the centering projector, so constants map to 0.
Matrix inverse_laplacian_matrix(const RhoOperator& delta, double gamma);

/// <f, Delta f>_{L2(rho)}.
double dirichlet_form(const StateActionFn& f, const RhoOperator& delta);

/// Projector onto L2_0(rho): f -> f - (rho^T f) 1.
class CenteredSubspace {
 public:
  explicit CenteredSubspace(StateActionWeights w) : weights_(std::move(w)) {}

  StateActionFn project(const StateActionFn& f) const;
  /// Id - 1 rho^T.
  Matrix matrix() const;

 private:
  StateActionWeights weights_;
};

/// phi <- phi C^{-1/2} with C the L2(rho) Gram matrix. Rejects columns whose
/// Gram matrix has condition number above 1e12.
FeatureSet orthonormalize(const Matrix& columns, const StateActionWeights& w, Provenance provenance = Provenance::kCustom);

/// Pi = phi phi^T rho_hat, the L2(rho)-orthogonal projector on span(phi).
RhoOperator projector(const FeatureSet& features);

}  // namespace rsf
