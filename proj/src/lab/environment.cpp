#include "rsf/lab/environment.hpp"

#include "rsf/errors.hpp"
#include "rsf/mdp_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace rsf::lab {

std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::kGridworld:
      return "gridworld";
    case GeneratorKind::kDirectedCycle:
      return "directed_cycle";
    case GeneratorKind::kRandomDeterministic:
      return "random_deterministic";
    case GeneratorKind::kRandomStochastic:
      return "random_stochastic";
    case GeneratorKind::kReversibleWalk:
      return "reversible_walk";
  }
  return "unknown";
}

GeneratorKind generator_from_string(std::string_view name) {
  for (auto k : {GeneratorKind::kGridworld, GeneratorKind::kDirectedCycle, GeneratorKind::kRandomDeterministic,
                 GeneratorKind::kRandomStochastic, GeneratorKind::kReversibleWalk}) {
    if (name == to_string(k)) return k;
  }
  throw DomainError("unknown generator kind: " + std::string(name));
}

std::string_view to_string(PolicyKind k) {
  return k == PolicyKind::kUniform ? "uniform" : "softmax_random_logits";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  if (name == "uniform") return PolicyKind::kUniform;
  if (name == "softmax_random_logits" || name == "softmax") return PolicyKind::kSoftmaxRandomLogits;
  throw DomainError("unknown policy kind: " + std::string(name));
}

bool EnvironmentSpec::deterministic_by_construction() const {
  switch (kind) {
    case GeneratorKind::kGridworld:
      return slip == 0.0;
    case GeneratorKind::kDirectedCycle:
    case GeneratorKind::kRandomDeterministic:
      return true;
    default:
      return false;
  }
}

std::string EnvironmentSpec::label() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == GeneratorKind::kGridworld) {
    os << width << "x" << height;
    if (slip > 0.0) os << "-slip" << slip;
  } else {
    os << num_states << "x" << num_actions;
  }
  if (policy == PolicyKind::kSoftmaxRandomLogits) os << "-softmax";
  return os.str();
}

nlohmann::json spec_to_json(const EnvironmentSpec& spec) {
  nlohmann::json j{{"kind", std::string(to_string(spec.kind))},
                   {"gamma", spec.gamma},
                   {"policy", std::string(to_string(spec.policy))},
                   {"seed", spec.seed}};
  if (spec.kind == GeneratorKind::kGridworld) {
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["slip"] = spec.slip;
  } else {
    j["num_states"] = spec.num_states;
    j["num_actions"] = spec.num_actions;
  }
  if (spec.policy == PolicyKind::kSoftmaxRandomLogits) {
    j["policy_floor"] = spec.policy_floor;
    j["logit_scale"] = spec.logit_scale;
  }
  return j;
}

EnvironmentSpec spec_from_json(const nlohmann::json& j) {
  EnvironmentSpec s;
  s.kind = generator_from_string(j.at("kind").get<std::string>());
  if (s.kind == GeneratorKind::kDirectedCycle) s.num_actions = 2;
  if (s.kind == GeneratorKind::kReversibleWalk) s.num_actions = 1;
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.num_states = j.value("num_states", s.num_states);
  s.num_actions = j.value("num_actions", s.num_actions);
  s.slip = j.value("slip", s.slip);
  s.gamma = j.value("gamma", s.gamma);
  s.policy = policy_kind_from_string(j.value("policy", std::string("uniform")));
  s.policy_floor = j.value("policy_floor", s.policy_floor);
  s.logit_scale = j.value("logit_scale", s.logit_scale);
  s.seed = j.value("seed", s.seed);
  return s;
}

Rng cell_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return Rng(seq);
}

namespace {

Mdp gridworld(const EnvironmentSpec& spec) {
  const Index w = spec.width;
  const Index h = spec.height;
  if (w < 1 || h < 1 || w * h < 2) throw DomainError("gridworld needs at least two cells");
  if (spec.slip < 0.0 || spec.slip > 1.0) throw DomainError("slip must lie in [0, 1]");
  const Index n = w * h;
  const Index m = 4;
  // up, down, left, right; moves into a wall leave the agent in place.
  const Index dx[4] = {0, 0, -1, 1};
  const Index dy[4] = {-1, 1, 0, 0};
  auto target = [&](Index s, Index a) {
    const Index x = s % w;
    const Index y = s / w;
    const Index nx = x + dx[a];
    const Index ny = y + dy[a];
    if (nx < 0 || nx >= w || ny < 0 || ny >= h) return s;
    return ny * w + nx;
  };
  Matrix p = Matrix::Zero(n * m, n);
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < m; ++a) {
      p(s * m + a, target(s, a)) += 1.0 - spec.slip;
      for (Index b = 0; b < m; ++b) p(s * m + a, target(s, b)) += spec.slip / static_cast<double>(m);
    }
  }
  return Mdp(n, m, std::move(p), spec.gamma);
}

Mdp directed_cycle(const EnvironmentSpec& spec) {
  const Index n = spec.num_states;
  const Index m = spec.num_actions;
  if (n < 2 || m < 1 || m >= n) throw DomainError("directed_cycle needs n >= 2 and 1 <= m < n");
  Matrix p = Matrix::Zero(n * m, n);
  // Action a advances a + 1 positions around the cycle.
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < m; ++a) p(s * m + a, (s + a + 1) % n) = 1.0;
  }
  return Mdp(n, m, std::move(p), spec.gamma);
}

Mdp random_deterministic(const EnvironmentSpec& spec, Rng& rng) {
  const Index n = spec.num_states;
  const Index m = spec.num_actions;
  if (n < 2 || m < 1) throw DomainError("random_deterministic needs n >= 2, m >= 1");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Matrix p = Matrix::Zero(n * m, n);
  for (Index i = 0; i < n; ++i) {
    const Index s = order[static_cast<std::size_t>(i)];
    // Action 0 walks a random Hamiltonian cycle, which makes the chain irreducible.
    p(s * m, order[static_cast<std::size_t>((i + 1) % n)]) = 1.0;
    for (Index a = 1; a < m; ++a) p(s * m + a, pick(rng)) = 1.0;
  }
  return Mdp(n, m, std::move(p), spec.gamma);
}

Mdp random_stochastic(const EnvironmentSpec& spec, Rng& rng) {
  const Index n = spec.num_states;
  const Index m = spec.num_actions;
  if (n < 2 || m < 1) throw DomainError("random_stochastic needs n >= 2, m >= 1");
  std::gamma_distribution<double> gamma_draw(1.0, 1.0);
  Matrix p(n * m, n);
  for (Index i = 0; i < n * m; ++i) {
    for (Index j = 0; j < n; ++j) p(i, j) = gamma_draw(rng);
    p.row(i) /= p.row(i).sum();
  }
  return Mdp(n, m, std::move(p), spec.gamma);
}

Mdp reversible_walk(const EnvironmentSpec& spec, Rng& rng) {
  const Index n = spec.num_states;
  if (n < 2) throw DomainError("reversible_walk needs n >= 2");
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::bernoulli_distribution extra(0.3);
  Matrix weights = Matrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    weights(s, s) = u(rng);
    const Index t = (s + 1) % n;
    const double ring = u(rng);
    weights(s, t) += ring;
    weights(t, s) += ring;
    for (Index q = s + 2; q < n; ++q) {
      if (extra(rng)) {
        const double c = u(rng);
        weights(s, q) += c;
        weights(q, s) += c;
      }
    }
  }
  Matrix p = weights;
  for (Index s = 0; s < n; ++s) p.row(s) /= p.row(s).sum();
  return Mdp(n, 1, std::move(p), spec.gamma);
}

Policy make_policy(const EnvironmentSpec& spec, Index n, Index m, Rng& rng) {
  if (spec.policy == PolicyKind::kUniform) return Policy::uniform(n, m);
  if (!(spec.policy_floor > 0.0 && spec.policy_floor <= 1.0)) throw DomainError("policy_floor must lie in (0, 1]");
  std::normal_distribution<double> normal(0.0, spec.logit_scale);
  Matrix probs(n, m);
  for (Index s = 0; s < n; ++s) {
    Eigen::ArrayXd logits(m);
    for (Index a = 0; a < m; ++a) logits(a) = normal(rng);
    const Eigen::ArrayXd e = (logits - logits.maxCoeff()).exp();
    probs.row(s) = ((1.0 - spec.policy_floor) * e / e.sum() + spec.policy_floor / static_cast<double>(m)).transpose();
    probs.row(s) /= probs.row(s).sum();
  }
  return Policy(std::move(probs));
}

}  // namespace

Environment generate_environment(const EnvironmentSpec& spec) {
  if (spec.gamma < 0.0 || spec.gamma > 1.0) throw DomainError("gamma must lie in [0, 1]");
  const bool randomized = spec.kind == GeneratorKind::kRandomDeterministic ||
                          spec.kind == GeneratorKind::kRandomStochastic ||
                          spec.kind == GeneratorKind::kReversibleWalk ||
                          spec.policy == PolicyKind::kSoftmaxRandomLogits;
  std::string last_verdict;
  for (int attempt = 0; attempt <= kMaxReseeds; ++attempt) {
    Rng rng = cell_rng(spec.seed, static_cast<std::uint64_t>(attempt));
    Mdp mdp = [&] {
      switch (spec.kind) {
        case GeneratorKind::kGridworld:
          return gridworld(spec);
        case GeneratorKind::kDirectedCycle:
          return directed_cycle(spec);
        case GeneratorKind::kRandomDeterministic:
          return random_deterministic(spec, rng);
        case GeneratorKind::kRandomStochastic:
          return random_stochastic(spec, rng);
        case GeneratorKind::kReversibleWalk:
          return reversible_walk(spec, rng);
      }
      throw DomainError("unknown generator");
    }();
    Policy pi0 = make_policy(spec, mdp.num_states(), mdp.num_actions(), rng);
    const Matrix p_pi = policy_transition(mdp, pi0);
    const ChainVerdict verdict = check_ergodicity(p_pi);
    if (verdict == ChainVerdict::kErgodic) {
      StateActionWeights w = stationary_distribution(p_pi, mdp.num_actions());
      return Environment{spec, std::move(mdp), std::move(pi0), std::move(w), attempt};
    }
    last_verdict = to_string(verdict);
    if (!randomized) break;
  }
  throw NumericalError("environment " + spec.label() + " (seed " + std::to_string(spec.seed) +
                       ") is not ergodic: " + last_verdict);
}

nlohmann::json environment_to_json(const Environment& env) {
  return {{"spec", spec_to_json(env.spec)},
          {"mdp", io::mdp_to_json(env.mdp)},
          {"policy", io::policy_to_json(env.pi0)},
          {"rho", std::vector<double>(env.weights.rho().begin(), env.weights.rho().end())}};
}

Environment environment_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("mdp") || !j.contains("policy")) {
    throw DomainError("environment file needs \"mdp\" and \"policy\"");
  }
  EnvironmentSpec spec;
  if (j.contains("spec")) spec = spec_from_json(j.at("spec"));
  Mdp mdp = io::mdp_from_json(j.at("mdp"));
  Policy pi0 = io::policy_from_json(j.at("policy"));
  if (pi0.num_states() != mdp.num_states() || pi0.num_actions() != mdp.num_actions()) {
    throw ShapeError("policy shape does not match the MDP");
  }
  spec.gamma = mdp.gamma();
  const Matrix p_pi = policy_transition(mdp, pi0);
  if (const ChainVerdict v = check_ergodicity(p_pi); v != ChainVerdict::kErgodic) {
    throw NumericalError("environment is not ergodic: " + std::string(to_string(v)));
  }
  StateActionWeights w = stationary_distribution(p_pi, mdp.num_actions());
  return Environment{spec, std::move(mdp), std::move(pi0), std::move(w), 0};
}

}  // namespace rsf::lab
