#include "rsf/mdp.hpp"

#include "rsf/errors.hpp"
#include "rsf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

namespace rsf {
namespace {

constexpr double kRowSumTol = 1e-12;

void check_stochastic_rows(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
  if (m.size() > 0 && m.minCoeff() < 0.0) throw DomainError(std::string(what) + ": negative entry");
  for (Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).sum() - 1.0) > kRowSumTol) {
      throw DomainError(std::string(what) + ": row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

// BFS levels from node 0 over the support graph (or its transpose).
std::vector<Index> bfs_levels(const Matrix& p, bool reverse) {
  const Index n = p.rows();
  std::vector<Index> level(n, -1);
  std::queue<Index> todo;
  level[0] = 0;
  todo.push(0);
  while (!todo.empty()) {
    const Index u = todo.front();
    todo.pop();
    for (Index v = 0; v < n; ++v) {
      const double w = reverse ? p(v, u) : p(u, v);
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        todo.push(v);
      }
    }
  }
  return level;
}

}  // namespace

namespace linalg {

Matrix solve(const Matrix& delta, const Matrix& rhs) {
  if (delta.rows() != delta.cols() || delta.rows() != rhs.rows()) throw ShapeError("solve: shape mismatch");
  Eigen::PartialPivLU<Matrix> lu(delta);
  Matrix x = lu.solve(rhs);
  if (!x.allFinite()) throw NumericalError("solve: singular system");
  return x;
}

Matrix centered_solve(const Matrix& delta, const Vector& rho, const Matrix& rhs) {
  const Index n = delta.rows();
  if (delta.cols() != n || rho.size() != n || rhs.rows() != n) throw ShapeError("centered_solve: shape mismatch");
  Matrix bordered = Matrix::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = delta;
  bordered.topRightCorner(n, 1).setOnes();
  bordered.bottomLeftCorner(1, n) = rho.transpose();
  Matrix b = Matrix::Zero(n + 1, rhs.cols());
  b.topRows(n) = rhs;
  Eigen::FullPivLU<Matrix> lu(bordered);
  if (!lu.isInvertible()) throw NumericalError("centered_solve: bordered system is singular (chain not ergodic?)");
  return lu.solve(b).topRows(n);
}

}  // namespace linalg

Mdp::Mdp(Index num_states, Index num_actions, Matrix transition, double gamma)
    : num_states_(num_states), num_actions_(num_actions), transition_(std::move(transition)), gamma_(gamma) {
  if (num_states <= 0 || num_actions <= 0) throw DomainError("Mdp: state and action counts must be positive");
  if (transition_.rows() != num_states * num_actions || transition_.cols() != num_states) {
    throw ShapeError("Mdp: transition must be (S*A) x S");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("Mdp: gamma must lie in [0, 1]");
  check_stochastic_rows(transition_, "Mdp transition");
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) throw ShapeError("Policy: empty probability table");
  check_stochastic_rows(probs_, "Policy");
}

Policy Policy::uniform(Index num_states, Index num_actions) {
  return Policy(Matrix::Constant(num_states, num_actions, 1.0 / static_cast<double>(num_actions)));
}

Matrix Policy::as_matrix() const {
  const Index S = num_states();
  const Index A = num_actions();
  Matrix m = Matrix::Zero(S, S * A);
  for (Index s = 0; s < S; ++s)
    for (Index a = 0; a < A; ++a) m(s, sa_index(s, a, A)) = probs_(s, a);
  return m;
}

StateActionWeights::StateActionWeights(Vector rho, Index num_actions) : rho_(std::move(rho)), num_actions_(num_actions) {
  if (num_actions <= 0 || rho_.size() == 0 || rho_.size() % num_actions != 0) {
    throw ShapeError("StateActionWeights: length must be a multiple of num_actions");
  }
  if (!rho_.allFinite() || rho_.minCoeff() <= 0.0) throw DomainError("StateActionWeights: rho must be strictly positive");
  if (std::abs(rho_.sum() - 1.0) > 1e-10) throw DomainError("StateActionWeights: rho must sum to 1");
  const Index S = rho_.size() / num_actions;
  rho_s_ = Vector::Zero(S);
  for (Index s = 0; s < S; ++s) rho_s_(s) = rho_.segment(s * num_actions, num_actions).sum();
}

const char* to_string(ChainVerdict v) {
  switch (v) {
    case ChainVerdict::kErgodic:
      return "ergodic";
    case ChainVerdict::kReducible:
      return "reducible";
    case ChainVerdict::kPeriodic:
      return "periodic";
  }
  return "unknown";
}

Matrix policy_transition(const Mdp& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw ShapeError("policy_transition: policy shape does not match the MDP");
  }
  const Index S = mdp.num_states();
  const Index A = mdp.num_actions();
  const Matrix& P = mdp.transition();
  Matrix p_pi(S * A, S * A);
  for (Index row = 0; row < S * A; ++row) {
    for (Index s2 = 0; s2 < S; ++s2) {
      const double p = P(row, s2);
      for (Index a2 = 0; a2 < A; ++a2) p_pi(row, sa_index(s2, a2, A)) = p * policy(s2, a2);
    }
  }
  return p_pi;
}

ChainVerdict check_ergodicity(const Matrix& p_pi) {
  const Index n = p_pi.rows();
  if (n == 0 || p_pi.cols() != n) throw ShapeError("check_ergodicity: square matrix required");
  const std::vector<Index> fwd = bfs_levels(p_pi, false);
  const std::vector<Index> bwd = bfs_levels(p_pi, true);
  for (Index i = 0; i < n; ++i) {
    if (fwd[i] < 0 || bwd[i] < 0) return ChainVerdict::kReducible;
  }
  // Period of an irreducible chain: gcd over edges u->v of level(u)+1-level(v).
  Index period = 0;
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      if (p_pi(u, v) > 0.0) period = std::gcd(period, std::abs(fwd[u] + 1 - fwd[v]));
    }
  }
  return period == 1 ? ChainVerdict::kErgodic : ChainVerdict::kPeriodic;
}

StateActionWeights stationary_distribution(const Matrix& p_pi, Index num_actions, const StationaryOptions& opts) {
  constexpr Index kDenseRefineLimit = 2048;
  const Index n = p_pi.rows();
  if (p_pi.cols() != n) throw ShapeError("stationary_distribution: square matrix required");
  const ChainVerdict verdict = check_ergodicity(p_pi);
  if (verdict == ChainVerdict::kReducible) {
    throw NumericalError(std::string("stationary_distribution: chain is ") + to_string(verdict));
  }
  // An irreducible periodic chain still has a unique stationary law, but the
  // plain iteration oscillates; the lazy chain (Id + P) / 2 shares the fixed
  // point and is aperiodic.
  const Matrix pt = verdict == ChainVerdict::kPeriodic
                        ? Matrix(0.5 * (p_pi.transpose() + Matrix::Identity(n, n)))
                        : Matrix(p_pi.transpose());
  Vector rho = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector next(n);
  double residual = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::int64_t since_best = 0;
  constexpr std::int64_t kStallWindow = 20'000;
  bool converged = false;
  for (std::int64_t it = 0; it < opts.max_iters; ++it) {
    next.noalias() = pt * rho;
    next /= next.sum();
    residual = (next - rho).cwiseAbs().maxCoeff();
    rho.swap(next);
    if (residual <= opts.tol) {
      converged = true;
      break;
    }
    if (residual < 0.5 * best) {
      best = residual;
      since_best = 0;
    } else if (++since_best > kStallWindow) {
      break;
    }
  }
  if (converged) {
    if (n <= kDenseRefineLimit) {
      // The iteration stops on a small step, but the error is that step divided
      // by the spectral gap, which is large for slowly mixing chains. Newton-type
      // correction: solve (P^T - Id) delta = -(P^T rho - rho), 1^T delta = 0.
      Matrix sys = pt - Matrix::Identity(n, n);
      sys.row(n - 1).setOnes();
      const Eigen::PartialPivLU<Matrix> lu(sys);
      for (int k = 0; k < 2; ++k) {
        Vector rhs = rho - pt * rho;
        rhs(n - 1) = 0.0;
        rho += lu.solve(rhs);
      }
      // One multiplication restores the exact product form rho_S(s) pi(a|s).
      next.noalias() = pt * rho;
      rho = next / next.sum();
    }
  } else {
    // Dense fallback: null vector of (P^T - Id) normalized to sum 1.
    Matrix sys = pt - Matrix::Identity(n, n);
    sys.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    rho = Eigen::FullPivLU<Matrix>(sys).solve(rhs);
    // A final multiplication puts rho in the exact product form rho_S(s) pi(a|s).
    for (int k = 0; k < 3; ++k) {
      next.noalias() = pt * rho;
      rho = next / next.sum();
    }
    residual = (pt * rho - rho).cwiseAbs().maxCoeff();
    if (!(residual <= opts.tol)) {
      throw NumericalError("stationary_distribution: no convergence (residual " + std::to_string(residual) + ")");
    }
  }
  if (!(rho.minCoeff() >= opts.floor)) throw NumericalError("stationary_distribution: non-positive stationary mass");
  return StateActionWeights(std::move(rho), num_actions);
}

bool is_deterministic(const Mdp& mdp) {
  const Matrix& P = mdp.transition();
  for (Index row = 0; row < P.rows(); ++row) {
    Index nonzero = 0;
    double value = 0.0;
    for (Index s2 = 0; s2 < P.cols(); ++s2) {
      if (P(row, s2) != 0.0) {
        ++nonzero;
        value = P(row, s2);
      }
    }
    if (nonzero != 1 || std::abs(value - 1.0) > 1e-12) return false;
  }
  return true;
}

StateActionFn q_function(const Mdp& mdp, const Policy& policy, const StateActionFn& reward,
                         const StateActionWeights* weights) {
  if (reward.size() != mdp.size()) throw ShapeError("q_function: reward length must be S*A");
  const Matrix p_pi = policy_transition(mdp, policy);
  const Index n = mdp.size();
  const Matrix delta = Matrix::Identity(n, n) - mdp.gamma() * p_pi;
  if (mdp.gamma() < 1.0) return linalg::solve(delta, reward);
  if (weights == nullptr || weights->size() != n) {
    throw DomainError("q_function: gamma = 1 requires the stationary weights of the policy");
  }
  if (std::abs(weights->rho().dot(reward)) > 1e-10) {
    throw DomainError("q_function: singular system at gamma = 1; center the reward first");
  }
  return linalg::centered_solve(delta, weights->rho(), reward);
}

std::pair<Vector, StateActionFn> value_and_advantage(const Policy& policy, const StateActionFn& q) {
  const Index S = policy.num_states();
  const Index A = policy.num_actions();
  if (q.size() != S * A) throw ShapeError("value_and_advantage: q length must be S*A");
  Vector v = Vector::Zero(S);
  StateActionFn adv(S * A);
  for (Index s = 0; s < S; ++s) {
    double vs = 0.0;
    for (Index a = 0; a < A; ++a) vs += policy(s, a) * q(sa_index(s, a, A));
    v(s) = vs;
    for (Index a = 0; a < A; ++a) adv(sa_index(s, a, A)) = q(sa_index(s, a, A)) - vs;
  }
  return {v, adv};
}

}  // namespace rsf
