#include "rsf/features.hpp"

#include "rsf/errors.hpp"
#include "rsf/geometry.hpp"

#include <string>

namespace rsf {

namespace {

void check_dimension(Index d, Index n) {
  if (d < 1 || d > n) throw DomainError("feature count d=" + std::to_string(d) + " outside [1, " + std::to_string(n) + "]");
}

}  // namespace

SpectralResult kernel_spectrum(const AdvantageKernel& kernel) {
  return centered_spectrum(kernel.selfadjoint_form(), kernel.weights(), "advantage_kernel", 0.0);
}

FeatureSet optimal_features(const AdvantageKernel& kernel, Index d) {
  check_dimension(d, kernel.size());
  return leading_eigenfeatures(kernel_spectrum(kernel), kernel.weights(), d, Provenance::kOptimal);
}

BaselineKind baseline_kind_from_string(std::string_view name) {
  if (name == "laplacian_eigs" || name == "laplacian") return BaselineKind::kLaplacian;
  if (name == "p_symmetrized") return BaselineKind::kPSymmetrized;
  if (name == "random") return BaselineKind::kRandom;
  throw DomainError("unknown baseline kind: " + std::string(name));
}

SpectralResult laplacian_spectrum(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w) {
  const RhoOperator delta = laplacian(mdp, pi0, w, 1.0);
  const Matrix op = delta.matrix() + adjoint(delta).matrix();
  return self_adjoint_spectrum(op, w, "laplacian");
}

SpectralResult p_symmetrized_spectrum(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w) {
  const Matrix p = policy_transition(mdp, pi0);
  return self_adjoint_spectrum(p + adjoint_matrix(p, w.rho()), w, "p_symmetrized");
}

FeatureSet leading_eigenfeatures(const SpectralResult& spectrum, const StateActionWeights& w, Index d,
                                 Provenance provenance) {
  check_dimension(d, spectrum.eigenvectors.cols());
  // Re-orthonormalize to remove the rounding left by the back-transform.
  return orthonormalize(spectrum.eigenvectors.leftCols(d), w, provenance);
}

FeatureSet random_features(const StateActionWeights& w, Index d, Rng& rng) {
  check_dimension(d, w.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix cols(w.size(), d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < w.size(); ++i) cols(i, j) = normal(rng);
  }
  return orthonormalize(cols, w, Provenance::kRandom);
}

FeatureSet baseline_features(BaselineKind kind, const Mdp& mdp, const Policy& pi0, const StateActionWeights& w,
                             Index d, Rng& rng) {
  check_dimension(d, mdp.size());
  switch (kind) {
    case BaselineKind::kLaplacian: {
      // Smallest eigenvalues sit at the right end of the descending spectrum.
      const SpectralResult spec = laplacian_spectrum(mdp, pi0, w);
      return orthonormalize(spec.eigenvectors.rightCols(d).rowwise().reverse(), w, Provenance::kLaplacian);
    }
    case BaselineKind::kPSymmetrized:
      return leading_eigenfeatures(p_symmetrized_spectrum(mdp, pi0, w), w, d, Provenance::kPSymmetrized);
    case BaselineKind::kRandom:
      return random_features(w, d, rng);
  }
  throw DomainError("unknown baseline kind");
}

double trace_gain(const FeatureSet& features, const AdvantageKernel& kernel) {
  if (features.size() != kernel.size()) throw ShapeError("trace_gain: size mismatch");
  if (features.gram_deviation() > 1e-8) throw DomainError("trace_gain: features are not L2(rho)-orthonormal");
  const Matrix& phi = features.columns();
  return (phi.transpose() * kernel.kernel() * phi).trace();
}

StateActionFn constant_projection(const FeatureSet& features) {
  const Matrix& phi = features.columns();
  return phi * (phi.transpose() * features.weights().rho());
}

double subspace_distance(const FeatureSet& a, const FeatureSet& b) {
  if (a.dim() != b.dim()) throw ShapeError("subspace_distance: feature counts differ");
  if (a.size() != b.size()) throw ShapeError("subspace_distance: sizes differ");
  return largest_principal_angle(a.columns(), b.columns(), a.weights());
}

double expected_gain_numerator(const FeatureSet& features, const AdvantageKernel& kernel, const RewardModel& model) {
  model.validate();
  const double tr = trace_gain(features, kernel);
  if (model.kind != RewardKind::kScattered) return tr;
  const StateActionFn cst = constant_projection(features);
  const double km = model.kappa * model.mu;
  return model.kappa * (model.mu * model.mu + model.sigma2) * tr - km * km * kernel_quadratic(kernel, cst);
}

double expected_gain_numerator_moments(const FeatureSet& features, const AdvantageKernel& kernel,
                                       const RewardModel& model) {
  const Matrix m = second_moment(model, kernel.weights());
  const Index n = kernel.size();
  const Matrix residual = Matrix::Identity(n, n) - projector(features).matrix();
  const Matrix& k = kernel.kernel();
  return (k * m).trace() - (k * residual * m * residual.transpose()).trace();
}

double expected_gain(const FeatureSet& features, const AdvantageKernel& kernel, const RewardModel& model,
                     double temperature) {
  if (!(temperature > 0.0)) throw DomainError("expected_gain: temperature must be positive");
  if (!(kernel.gamma() < 1.0)) throw DomainError("expected_gain: gamma must be below 1");
  return expected_gain_numerator(features, kernel, model) / (2.0 * temperature * (1.0 - kernel.gamma()));
}

double expected_baseline_return(const RewardModel& model, const StateActionWeights& w, double gamma) {
  if (!(gamma < 1.0)) throw DomainError("expected_baseline_return: gamma must be below 1");
  return w.rho().dot(first_moment(model, w)) / (1.0 - gamma);
}

}  // namespace rsf
