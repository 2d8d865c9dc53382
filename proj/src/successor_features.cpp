#include "rsf/successor_features.hpp"

#include "rsf/errors.hpp"
#include "rsf/geometry.hpp"
#include "rsf/linalg.hpp"
#include "rsf/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rsf {

namespace {

void require_temperature(double t) {
  if (!(t >= kMinTemperature) || !std::isfinite(t)) {
    throw DomainError("temperature must be finite and at least 1e-6, got " + std::to_string(t));
  }
}

}  // namespace

SuccessorFeatures successor_feature_map(const FeatureSet& features, const Mdp& mdp, const Policy& pi0) {
  if (!(mdp.gamma() < 1.0)) throw DomainError("successor features need gamma < 1");
  if (features.size() != mdp.size()) throw ShapeError("feature rows do not match the MDP's state-actions");
  const Matrix p_pi = policy_transition(mdp, pi0);
  const Matrix delta = Matrix::Identity(mdp.size(), mdp.size()) - mdp.gamma() * p_pi;
  SuccessorFeatures sf;
  sf.gamma = mdp.gamma();
  sf.psi = linalg::solve(delta, features.columns());
  const Matrix& phi = features.columns();
  sf.covariance = phi.transpose() * features.weights().rho().asDiagonal() * phi;
  sf.covariance = 0.5 * (sf.covariance + sf.covariance.transpose()).eval();
  const double res = bellman_residual(sf, features, mdp, pi0);
  if (res > 1e-9) throw NumericalError("successor feature Bellman residual " + std::to_string(res));
  return sf;
}

double bellman_residual(const SuccessorFeatures& sf, const FeatureSet& features, const Mdp& mdp, const Policy& pi0) {
  const Matrix p_pi = policy_transition(mdp, pi0);
  const Matrix& phi = features.columns();
  const Matrix r = sf.psi - phi - mdp.gamma() * p_pi * sf.psi;
  double worst = 0.0;
  for (Index i = 0; i < phi.cols(); ++i) {
    const double scale = std::max(phi.col(i).cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst, r.col(i).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

Vector task_vector(const FeatureSet& features, const StateActionFn& reward) {
  if (reward.size() != features.size()) throw ShapeError("task_vector: reward length mismatch");
  const Matrix& phi = features.columns();
  return phi.transpose() * features.weights().rho().cwiseProduct(reward);
}

Vector task_vector(const FeatureSet& features, const RewardSample& sample) {
  if (sample.goal) return features.columns().row(*sample.goal).transpose();
  if (!sample.points.empty()) {
    Vector z = Vector::Zero(features.dim());
    for (const auto& p : sample.points) z += p.weight * features.columns().row(p.index).transpose();
    return z;
  }
  return task_vector(features, sample.reward);
}

StateActionFn q_estimate(const SuccessorFeatures& sf, const Vector& z) {
  if (z.size() != sf.psi.cols()) throw ShapeError("q_estimate: task vector length differs from feature count");
  StateActionFn q(sf.psi.rows());
  if (z.size() == 0) {
    q.setZero();
    return q;
  }
  simd::gemv({sf.psi.data(), static_cast<std::size_t>(sf.psi.size())}, static_cast<std::size_t>(sf.psi.rows()),
             static_cast<std::size_t>(sf.psi.cols()), as_span(z), as_span(q));
  return q;
}

Policy boltzmann_policy(const Policy& pi0, const StateActionFn& f, double temperature) {
  require_temperature(temperature);
  const Index s_count = pi0.num_states();
  const Index a_count = pi0.num_actions();
  if (f.size() != s_count * a_count) throw ShapeError("boltzmann_policy: function length mismatch");
  if (!pi0.strictly_positive()) throw DomainError("boltzmann_policy: pi0 must be strictly positive");
  Matrix probs(s_count, a_count);
  for (Index s = 0; s < s_count; ++s) {
    const auto row = f.segment(s * a_count, a_count);
    const double top = row.maxCoeff();
    const Eigen::ArrayXd shifted = (row.array() - top) / temperature;
    if ((shifted == 0.0).all()) {
      probs.row(s) = pi0.probs().row(s);
      continue;
    }
    const Eigen::ArrayXd tilt = pi0.probs().row(s).transpose().array() * shifted.exp();
    probs.row(s) = (tilt / tilt.sum()).transpose();
  }
  return Policy(std::move(probs));
}

Vector kl_penalty(const Policy& pi, const Policy& pi0, double temperature) {
  if (pi.num_states() != pi0.num_states() || pi.num_actions() != pi0.num_actions()) {
    throw ShapeError("kl_penalty: policy shapes differ");
  }
  Vector k = Vector::Zero(pi.num_states());
  for (Index s = 0; s < pi.num_states(); ++s) {
    double acc = 0.0;
    for (Index a = 0; a < pi.num_actions(); ++a) {
      const double p = pi(s, a);
      if (p == 0.0) continue;
      const double q = pi0(s, a);
      if (q == 0.0) throw DomainError("kl_penalty: pi is not absolutely continuous w.r.t. pi0");
      if (p == q) continue;
      acc += p * std::log(p / q);
    }
    k(s) = temperature * std::max(acc, 0.0);
  }
  return k;
}

Vector boltzmann_kl_penalty(const Policy& pi0, const StateActionFn& f, double temperature) {
  require_temperature(temperature);
  const Index s_count = pi0.num_states();
  const Index a_count = pi0.num_actions();
  if (f.size() != s_count * a_count) throw ShapeError("boltzmann_kl_penalty: function length mismatch");
  if (!pi0.strictly_positive()) throw DomainError("boltzmann_kl_penalty: pi0 must be strictly positive");
  Vector k(s_count);
  for (Index s = 0; s < s_count; ++s) {
    const Eigen::ArrayXd p0 = pi0.probs().row(s).transpose().array();
    const Eigen::ArrayXd row = f.segment(s * a_count, a_count).array();
    // Centre on the pi0-mean so that g is small whenever the tilt is.
    const Eigen::ArrayXd g = (row - (p0 * row).sum()) / temperature;
    if ((g == 0.0).all()) {
      k(s) = 0.0;
      continue;
    }
    if (g.maxCoeff() > 1.0) {
      // Far from pi0 the direct formula is accurate and expm1 could overflow.
      const double top = g.maxCoeff();
      const Eigen::ArrayXd e = p0 * (g - top).exp();
      const double z = e.sum();
      k(s) = temperature * std::max(0.0, (e * g).sum() / z - top - std::log(z));
      continue;
    }
    const Eigen::ArrayXd em1 = g.unaryExpr([](double x) { return std::expm1(x); });
    // Z = E_pi0[e^g] = 1 + E_pi0[expm1(g)];  E_pi[g] = E_pi0[g e^g] / Z.
    const double z_minus_1 = (p0 * em1).sum();
    const double mean_g = (p0 * g).sum() + (p0 * g * em1).sum();
    const double kl = mean_g / (1.0 + z_minus_1) - std::log1p(z_minus_1);
    k(s) = temperature * std::max(0.0, kl);
  }
  return k;
}

RegularizedReturn regularized_return(const Mdp& mdp, const Policy& pi0, const Policy& pi, const StateActionFn& reward,
                                     double temperature, const StateActionWeights& w) {
  return regularized_return(mdp, pi, reward, kl_penalty(pi, pi0, temperature), temperature, w);
}

RegularizedReturn tilted_return(const Mdp& mdp, const Policy& pi0, const StateActionFn& f,
                                const StateActionFn& reward, double temperature, const StateActionWeights& w) {
  const Policy pi = boltzmann_policy(pi0, f, temperature);
  return regularized_return(mdp, pi, reward, boltzmann_kl_penalty(pi0, f, temperature), temperature, w);
}

RegularizedReturn regularized_return(const Mdp& mdp, const Policy& pi, const StateActionFn& reward,
                                     const Vector& k, double temperature, const StateActionWeights& w) {
  if (!(mdp.gamma() < 1.0)) throw DomainError("regularized_return needs gamma < 1");
  require_temperature(temperature);
  const Index n = mdp.size();
  if (reward.size() != n) throw ShapeError("regularized_return: reward length mismatch");
  if (k.size() != mdp.num_states()) throw ShapeError("regularized_return: penalty length mismatch");
  if (pi.num_states() != mdp.num_states() || pi.num_actions() != mdp.num_actions()) {
    throw ShapeError("regularized_return: policy shape mismatch");
  }
  const Index a_count = mdp.num_actions();

  Matrix rhs(n, 2);
  rhs.col(0) = reward;
  for (Index s = 0; s < mdp.num_states(); ++s) rhs.col(1).segment(s * a_count, a_count).setConstant(k(s));
  const Matrix p_pi = policy_transition(mdp, pi);
  const Matrix q = linalg::solve(Matrix::Identity(n, n) - mdp.gamma() * p_pi, rhs);

  // Initial weights rho_S(s) pi(a|s).
  Vector start(n);
  for (Index s = 0; s < mdp.num_states(); ++s) {
    for (Index a = 0; a < a_count; ++a) start(s * a_count + a) = w.rho_s()(s) * pi(s, a);
  }
  RegularizedReturn out;
  out.temperature = temperature;
  out.unpenalized = start.dot(q.col(0));
  out.penalty = k.isZero(0.0) ? 0.0 : start.dot(q.col(1));
  out.value = out.unpenalized - out.penalty;
  return out;
}

double first_order_prediction(const StateActionFn& q_true, const StateActionFn& q_hat, double g_pi0, double temperature,
                           double gamma, const StateActionWeights& w, const Policy& pi0) {
  if (!(gamma < 1.0)) throw DomainError("first_order_prediction needs gamma < 1");
  require_temperature(temperature);
  const double gain = advantage_norm_sq(q_true, w, pi0) - advantage_norm_sq(q_hat - q_true, w, pi0);
  return g_pi0 + gain / (2.0 * temperature * (1.0 - gamma));
}

RsfPolicy rsf_policy(const FeatureSet& features, const SuccessorFeatures& sf, const RewardSample& sample,
                     const Policy& pi0, double temperature) {
  Vector z = task_vector(features, sample);
  StateActionFn q_hat = q_estimate(sf, z);
  Policy policy = boltzmann_policy(pi0, q_hat, temperature);
  return {std::move(z), std::move(q_hat), std::move(policy)};
}

}  // namespace rsf
