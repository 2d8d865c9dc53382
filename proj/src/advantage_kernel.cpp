#include "rsf/advantage_kernel.hpp"

#include "rsf/errors.hpp"
#include "rsf/linalg.hpp"
#include "rsf/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rsf {
namespace {

void require_deterministic(const Mdp& mdp, const char* what) {
  if (!is_deterministic(mdp)) {
    throw DomainError(std::string(what) + ": closed form holds only in deterministic environments");
  }
}

void require_shapes(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, const char* what) {
  if (pi0.num_states() != mdp.num_states() || pi0.num_actions() != mdp.num_actions() || w.size() != mdp.size()) {
    throw ShapeError(std::string(what) + ": MDP, policy and weights disagree in shape");
  }
}

// rho_hat - pi0^T rho_S_hat pi0
Matrix advantage_metric(const Policy& pi0, const StateActionWeights& w) {
  const Index S = pi0.num_states();
  const Index A = pi0.num_actions();
  Matrix m = w.rho_hat();
  for (Index s = 0; s < S; ++s) {
    for (Index a = 0; a < A; ++a) {
      for (Index b = 0; b < A; ++b) {
        m(sa_index(s, a, A), sa_index(s, b, A)) -= w.rho_s()(s) * pi0(s, a) * pi0(s, b);
      }
    }
  }
  return m;
}

// Y = (Id - gamma P)^{-1} (Id - 1 rho^T). Every operator assembled below
// annihilates constants, so Y can stand in for the full inverse; unlike the
// inverse, whose entries grow like 1/(1 - gamma), Y stays bounded by the
// mixing time of the chain.
Matrix centered_resolvent(const Matrix& p, const StateActionWeights& w, double gamma) {
  const Index n = w.size();
  return linalg::solve(Matrix::Identity(n, n) - gamma * p, CenteredSubspace(w).matrix());
}

}  // namespace

AdvantageKernel::AdvantageKernel(Matrix kernel, StateActionWeights weights, double gamma, bool deterministic_env)
    : kernel_(std::move(kernel)), weights_(std::move(weights)), gamma_(gamma), deterministic_env_(deterministic_env) {
  if (kernel_.rows() != kernel_.cols() || kernel_.rows() != weights_.size()) {
    throw ShapeError("AdvantageKernel: kernel must be (S*A) x (S*A)");
  }
  if (!kernel_.allFinite()) throw NumericalError("AdvantageKernel: non-finite entry");
  const double asym = (kernel_ - kernel_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) throw NumericalError("AdvantageKernel: kernel is not symmetric");
  const double scale = std::max(1.0, kernel_.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(kernel_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < kPsdTol * scale) {
    throw NumericalError("AdvantageKernel: kernel is not positive semi-definite");
  }
  selfadjoint_ = weights_.rho().cwiseInverse().asDiagonal() * kernel_;
}

AdvantageKernel build_kernel(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma) {
  require_shapes(mdp, pi0, w, "build_kernel");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw DomainError("build_kernel: gamma must lie in [0, 1); use closed_form_operator at gamma = 1");
  }
  // The metric kills constants, so (Delta^{-1})^T M Delta^{-1} = Y^T M Y.
  const Matrix y = centered_resolvent(policy_transition(mdp, pi0), w, gamma);
  Matrix k = y.transpose() * advantage_metric(pi0, w) * y;
  k = 0.5 * (k + k.transpose()).eval();
  return AdvantageKernel(std::move(k), w, gamma, is_deterministic(mdp));
}

double kernel_quadratic(const AdvantageKernel& k, const StateActionFn& r) {
  if (r.size() != k.size()) throw ShapeError("kernel_quadratic: reward length must be S*A");
  return simd::quadratic_form({k.kernel().data(), static_cast<std::size_t>(k.kernel().size())},
                              static_cast<std::size_t>(k.size()), as_span(r));
}

double kernel_quadratic_pair(const AdvantageKernel& k, const StateActionFn& r1, const StateActionFn& r2) {
  if (r1.size() != k.size() || r2.size() != k.size()) throw ShapeError("kernel_quadratic_pair: reward length must be S*A");
  const StateActionFn kr2 = k.kernel() * r2;
  return simd::dot(as_span(r1), as_span(kr2));
}

RhoOperator inverse_symmetrized_operator(const Matrix& p_pi0, const StateActionWeights& w) {
  const Index n = w.size();
  if (p_pi0.rows() != n || p_pi0.cols() != n) throw ShapeError("inverse_symmetrized_operator: shape mismatch");
  const Matrix centering = CenteredSubspace(w).matrix();
  const Matrix g = linalg::centered_solve(Matrix::Identity(n, n) - p_pi0, w.rho(), centering);
  return RhoOperator(g + adjoint_matrix(g, w.rho()) - centering, w);
}

RhoOperator closed_form_operator(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma) {
  require_shapes(mdp, pi0, w, "closed_form_operator");
  require_deterministic(mdp, "closed_form_operator");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("closed_form_operator: gamma must lie in [0, 1]");
  const Index n = mdp.size();
  const Matrix p = policy_transition(mdp, pi0);
  const Matrix id = Matrix::Identity(n, n);
  if (gamma == 0.0) return RhoOperator(id - adjoint_matrix(p, w.rho()) * p, w);
  if (gamma == 1.0) return inverse_symmetrized_operator(p, w);
  // gamma^{-2}(D + D* - Id - (1 - gamma^2) D* D) with D = Delta^{-1}. Writing
  // D = Id + gamma P D and sandwiching with the centering projector C (the
  // operator vanishes on constants) gives the equal expression
  //   C + gamma (C E + (C E)*) - (1 - gamma^2) E* E,   E = P Y,
  // which has no gamma^{-2} cancellation and no 1/(1 - gamma) growth.
  const Matrix c = CenteredSubspace(w).matrix();
  const Matrix e = p * centered_resolvent(p, w, gamma);
  const Matrix ce = c * e;
  Matrix b = c + gamma * (ce + adjoint_matrix(ce, w.rho())) - (1.0 - gamma * gamma) * adjoint_matrix(e, w.rho()) * e;
  return RhoOperator(std::move(b), w);
}

RhoOperator alt_form_operator(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma) {
  require_shapes(mdp, pi0, w, "alt_form_operator");
  require_deterministic(mdp, "alt_form_operator");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("alt_form_operator: gamma must lie in [0, 1)");
  const Index n = mdp.size();
  const Matrix p = policy_transition(mdp, pi0);
  const Matrix middle = Matrix::Identity(n, n) - adjoint_matrix(p, w.rho()) * p;
  // Id - P* P kills constants here, so D* (Id - P* P) D = Y* (Id - P* P) Y.
  const Matrix y = centered_resolvent(p, w, gamma);
  return RhoOperator(adjoint_matrix(y, w.rho()) * middle * y, w);
}

double alt_form_quadratic(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w, double gamma,
                          const StateActionFn& r) {
  if (r.size() != mdp.size()) throw ShapeError("alt_form_quadratic: reward length must be S*A");
  return alt_form_operator(mdp, pi0, w, gamma).form(r, r);
}

NormIdentities advantage_norm_identities(const StateActionFn& f, const Mdp& mdp, const Policy& pi0,
                                 const StateActionWeights& w, double gamma) {
  require_shapes(mdp, pi0, w, "advantage_norm_identities");
  require_deterministic(mdp, "advantage_norm_identities");
  if (f.size() != mdp.size()) throw ShapeError("advantage_norm_identities: function length must be S*A");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("advantage_norm_identities: gamma must lie in [0, 1]");
  const Matrix p = policy_transition(mdp, pi0);
  const StateActionFn pf = p * f;
  NormIdentities out{};
  out.advantage = advantage_norm_sq(f, w, pi0);
  out.first = l2rho_norm_sq(f, w) - l2rho_norm_sq(pf, w);
  if (gamma > 0.0) {
    // The bracket is O(gamma^2) while each term is O(||f||^2); accumulate in
    // extended precision so the division does not amplify rounding.
    long double cross = 0.0L, dd = 0.0L, ff = 0.0L;
    const long double g = gamma;
    for (Index i = 0; i < f.size(); ++i) {
      const long double fi = f(i);
      const long double di = fi - g * static_cast<long double>(pf(i));
      const long double ri = w.rho()(i);
      cross += ri * fi * di;
      dd += ri * di * di;
      ff += ri * fi * fi;
    }
    out.second = static_cast<double>((2.0L * cross - dd - (1.0L - g * g) * ff) / (g * g));
  }
  return out;
}

double norm_identity_gap(const StateActionFn& f, const Mdp& mdp, const Policy& pi0, const StateActionWeights& w) {
  require_shapes(mdp, pi0, w, "norm_identity_gap");
  if (f.size() != mdp.size()) throw ShapeError("norm_identity_gap: function length must be S*A");
  const StateActionFn pf = policy_transition(mdp, pi0) * f;
  return l2rho_norm_sq(f, w) - l2rho_norm_sq(pf, w) - advantage_norm_sq(f, w, pi0);
}

}  // namespace rsf
