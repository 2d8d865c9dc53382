#include "rsf/geometry.hpp"

#include "rsf/errors.hpp"
#include "rsf/linalg.hpp"
#include "rsf/simd/kernels.hpp"

#include <cmath>

namespace rsf {
namespace {

constexpr double kMaxGramCondition = 1e12;

void require_size(const StateActionFn& f, const StateActionWeights& w, const char* what) {
  if (f.size() != w.size()) throw ShapeError(std::string(what) + ": function length must be S*A");
}

// f(s,a) - E_{a'~pi0(s)} f(s,a')
StateActionFn action_centered(const StateActionFn& f, const Policy& pi0) {
  const Index S = pi0.num_states();
  const Index A = pi0.num_actions();
  StateActionFn out(f.size());
  for (Index s = 0; s < S; ++s) {
    double mean = 0.0;
    for (Index a = 0; a < A; ++a) mean += pi0(s, a) * f(sa_index(s, a, A));
    for (Index a = 0; a < A; ++a) out(sa_index(s, a, A)) = f(sa_index(s, a, A)) - mean;
  }
  return out;
}

}  // namespace

double l2rho_inner(const StateActionFn& f, const StateActionFn& g, const StateActionWeights& w) {
  require_size(f, w, "l2rho_inner");
  require_size(g, w, "l2rho_inner");
  return simd::weighted_dot(as_span(w.rho()), as_span(f), as_span(g));
}

double l2rho_norm_sq(const StateActionFn& f, const StateActionWeights& w) {
  require_size(f, w, "l2rho_norm_sq");
  return simd::weighted_sq_norm(as_span(w.rho()), as_span(f));
}

double advantage_inner(const StateActionFn& f, const StateActionFn& g, const StateActionWeights& w,
                       const Policy& pi0) {
  require_size(f, w, "advantage_inner");
  require_size(g, w, "advantage_inner");
  if (pi0.num_states() * pi0.num_actions() != w.size()) throw ShapeError("advantage_inner: policy shape mismatch");
  const StateActionFn fc = action_centered(f, pi0);
  const StateActionFn gc = action_centered(g, pi0);
  return simd::weighted_dot(as_span(w.rho()), as_span(fc), as_span(gc));
}

double advantage_norm_sq(const StateActionFn& f, const StateActionWeights& w, const Policy& pi0) {
  require_size(f, w, "advantage_norm_sq");
  if (pi0.num_states() * pi0.num_actions() != w.size()) throw ShapeError("advantage_norm_sq: policy shape mismatch");
  const StateActionFn fc = action_centered(f, pi0);
  return simd::weighted_sq_norm(as_span(w.rho()), as_span(fc));
}

RhoOperator::RhoOperator(Matrix matrix, StateActionWeights weights)
    : matrix_(std::move(matrix)), weights_(std::move(weights)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != weights_.size()) {
    throw ShapeError("RhoOperator: matrix must be (S*A) x (S*A)");
  }
  if (!matrix_.allFinite()) throw DomainError("RhoOperator: non-finite entry");
}

double RhoOperator::form(const StateActionFn& f, const StateActionFn& g) const {
  const StateActionFn mg = matrix_ * g;
  return l2rho_inner(f, mg, weights_);
}

Matrix adjoint_matrix(const Matrix& m, const Vector& rho) {
  return rho.cwiseInverse().asDiagonal() * m.transpose() * rho.asDiagonal();
}

RhoOperator adjoint(const RhoOperator& m) {
  return RhoOperator(adjoint_matrix(m.matrix(), m.weights().rho()), m.weights());
}

RhoOperator laplacian(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("laplacian: gamma must lie in [0, 1]");
  if (w.size() != mdp.size()) throw ShapeError("laplacian: weights do not match the MDP");
  const Index n = mdp.size();
  Matrix delta = Matrix::Identity(n, n) - gamma * policy_transition(mdp, pi0);
  return RhoOperator(std::move(delta), w);
}

StateActionFn apply_inverse_laplacian(const RhoOperator& delta, const StateActionFn& r, double gamma) {
  require_size(r, delta.weights(), "apply_inverse_laplacian");
  if (gamma < 1.0) return linalg::solve(delta.matrix(), r);
  if (std::abs(delta.weights().rho().dot(r)) > 1e-10) {
    throw DomainError("apply_inverse_laplacian: reward has nonzero rho-mean at gamma = 1; center the reward first");
  }
  return linalg::centered_solve(delta.matrix(), delta.weights().rho(), r);
}

Matrix inverse_laplacian_matrix(const RhoOperator& delta, double gamma) {
  const Index n = delta.size();
  if (gamma < 1.0) return linalg::solve(delta.matrix(), Matrix::Identity(n, n));
  return linalg::centered_solve(delta.matrix(), delta.weights().rho(), CenteredSubspace(delta.weights()).matrix());
}

double dirichlet_form(const StateActionFn& f, const RhoOperator& delta) {
  require_size(f, delta.weights(), "dirichlet_form");
  return delta.form(f, f);
}

StateActionFn CenteredSubspace::project(const StateActionFn& f) const {
  require_size(f, weights_, "CenteredSubspace::project");
  return f.array() - weights_.rho().dot(f);
}

Matrix CenteredSubspace::matrix() const {
  const Index n = weights_.size();
  return Matrix::Identity(n, n) - Vector::Ones(n) * weights_.rho().transpose();
}

FeatureSet orthonormalize(const Matrix& columns, const StateActionWeights& w, Provenance provenance) {
  if (columns.rows() != w.size()) throw ShapeError("orthonormalize: columns must have S*A rows");
  if (columns.cols() == 0) return FeatureSet(columns, w, provenance);
  Matrix phi = columns;
  // A second pass removes the residual non-orthogonality left by an
  // ill-conditioned first pass.
  for (int pass = 0; pass < 2; ++pass) {
    const Matrix gram = phi.transpose() * w.rho().asDiagonal() * phi;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (gram + gram.transpose()));
    const Vector& lambda = eig.eigenvalues();
    if (!(lambda.minCoeff() > 0.0) || lambda.maxCoeff() / lambda.minCoeff() > kMaxGramCondition) {
      throw NumericalError("orthonormalize: feature columns are rank deficient in L2(rho)");
    }
    const Matrix inv_sqrt = eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                            eig.eigenvectors().transpose();
    phi = phi * inv_sqrt;
    const Matrix check = phi.transpose() * w.rho().asDiagonal() * phi;
    if ((check - Matrix::Identity(check.rows(), check.cols())).cwiseAbs().maxCoeff() < 1e-13) break;
  }
  return FeatureSet(std::move(phi), w, provenance);
}

RhoOperator projector(const FeatureSet& features) {
  const Index n = features.size();
  if (features.dim() == 0) return RhoOperator(Matrix::Zero(n, n), features.weights());
  const Matrix& phi = features.columns();
  return RhoOperator(phi * (phi.transpose() * features.weights().rho().asDiagonal()), features.weights());
}

}  // namespace rsf
