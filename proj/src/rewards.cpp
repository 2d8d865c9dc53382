#include "rsf/rewards.hpp"

#include "rsf/errors.hpp"

#include <cmath>
#include <sstream>

namespace rsf {

std::string_view to_string(RewardKind k) {
  switch (k) {
    case RewardKind::kGaussian:
      return "gaussian";
    case RewardKind::kGoal:
      return "goal";
    case RewardKind::kScattered:
      return "scattered";
  }
  return "unknown";
}

RewardKind reward_kind_from_string(std::string_view name) {
  if (name == "gaussian") return RewardKind::kGaussian;
  if (name == "goal" || name == "goal_reaching") return RewardKind::kGoal;
  if (name == "scattered") return RewardKind::kScattered;
  throw DomainError("unknown reward model: " + std::string(name));
}

RewardModel RewardModel::scattered(double kappa, double mu, double sigma2, WeightLaw law) {
  RewardModel m{RewardKind::kScattered, kappa, mu, sigma2, law};
  m.validate();
  return m;
}

void RewardModel::validate() const {
  if (kind == RewardKind::kScattered && !(kappa > 0.0)) throw DomainError("scattered rewards need kappa > 0");
  if (!(sigma2 >= 0.0)) throw DomainError("reward weight variance must be non-negative");
}

std::string RewardModel::label() const {
  if (kind != RewardKind::kScattered) return std::string(to_string(kind));
  std::ostringstream os;
  os << "scattered(kappa=" << kappa << ",mu=" << mu << ",sigma2=" << sigma2 << ")";
  return os.str();
}

nlohmann::json reward_model_to_json(const RewardModel& m) {
  return {{"kind", std::string(to_string(m.kind))},
          {"kappa", m.kappa},
          {"mu", m.mu},
          {"sigma2", m.sigma2},
          {"weight_law", m.weight_law == WeightLaw::kNormal ? "normal" : "uniform"}};
}

RewardModel reward_model_from_json(const nlohmann::json& j) {
  RewardModel m;
  m.kind = reward_kind_from_string(j.at("kind").get<std::string>());
  m.kappa = j.value("kappa", m.kappa);
  m.mu = j.value("mu", m.mu);
  m.sigma2 = j.value("sigma2", m.sigma2);
  const std::string law = j.value("weight_law", std::string("normal"));
  if (law == "normal") {
    m.weight_law = WeightLaw::kNormal;
  } else if (law == "uniform") {
    m.weight_law = WeightLaw::kUniform;
  } else {
    throw DomainError("unknown weight_law: " + law);
  }
  m.validate();
  return m;
}

RewardSample sample_reward(const RewardModel& model, const StateActionWeights& w, Rng& rng) {
  model.validate();
  const Vector& rho = w.rho();
  const Index n = rho.size();
  RewardSample out{StateActionFn::Zero(n), std::nullopt, {}};
  switch (model.kind) {
    case RewardKind::kGaussian: {
      // Density proportional to exp(-r^T rho_hat r / 2): independent N(0, 1/rho(s,a)).
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = 0; i < n; ++i) out.reward(i) = normal(rng) / std::sqrt(rho(i));
      break;
    }
    case RewardKind::kGoal: {
      std::discrete_distribution<Index> pick(rho.data(), rho.data() + n);
      const Index g = pick(rng);
      out.goal = g;
      out.reward(g) = 1.0 / rho(g);
      break;
    }
    case RewardKind::kScattered: {
      std::poisson_distribution<int> count(model.kappa);
      std::discrete_distribution<Index> pick(rho.data(), rho.data() + n);
      std::normal_distribution<double> normal(model.mu, std::sqrt(model.sigma2));
      const double half_width = std::sqrt(3.0 * model.sigma2);
      std::uniform_real_distribution<double> uniform(model.mu - half_width, model.mu + half_width);
      const int num = count(rng);
      out.points.reserve(static_cast<std::size_t>(num));
      for (int i = 0; i < num; ++i) {
        const Index idx = pick(rng);
        double weight = model.mu;
        if (model.sigma2 > 0.0) weight = model.weight_law == WeightLaw::kNormal ? normal(rng) : uniform(rng);
        out.points.push_back({idx, weight});
        out.reward(idx) += weight / rho(idx);
      }
      break;
    }
  }
  return out;
}

double rho_integral(const RewardSample& sample, const StateActionWeights& w) {
  if (sample.goal) return 1.0;
  return w.rho().dot(sample.reward);
}

Matrix second_moment(const RewardModel& model, const StateActionWeights& w) {
  model.validate();
  const Index n = w.size();
  Matrix m = w.rho().cwiseInverse().asDiagonal();
  if (model.kind == RewardKind::kScattered) {
    const double km = model.kappa * model.mu;
    m *= model.kappa * (model.mu * model.mu + model.sigma2);
    m += Matrix::Constant(n, n, km * km);
  }
  return m;
}

Vector first_moment(const RewardModel& model, const StateActionWeights& w) {
  model.validate();
  const Index n = w.size();
  switch (model.kind) {
    case RewardKind::kGaussian:
      return Vector::Zero(n);
    case RewardKind::kGoal:
      return Vector::Ones(n);
    case RewardKind::kScattered:
      return Vector::Constant(n, model.kappa * model.mu);
  }
  return Vector::Zero(n);
}

double expected_quadratic(const Matrix& m, const RewardModel& model, const StateActionWeights& w) {
  model.validate();
  if (m.rows() != w.size() || m.cols() != w.size()) throw ShapeError("expected_quadratic: matrix must be (S*A) x (S*A)");
  double diag_part = m.diagonal().cwiseQuotient(w.rho()).sum();
  if (model.kind != RewardKind::kScattered) return diag_part;
  const double km = model.kappa * model.mu;
  return model.kappa * (model.mu * model.mu + model.sigma2) * diag_part + km * km * m.sum();
}

}  // namespace rsf
