#pragma once

// Seeded environment generators for the experiment harness.

#include "rsf/mdp.hpp"
#include "rsf/rewards.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace rsf::lab {

enum class GeneratorKind {
  kGridworld,
  kDirectedCycle,
  kRandomDeterministic,
  kRandomStochastic,
  // Single-action random walk on a symmetric weighted graph; its chain is reversible.
  kReversibleWalk,
};
enum class PolicyKind { kUniform, kSoftmaxRandomLogits };

std::string_view to_string(GeneratorKind k);
GeneratorKind generator_from_string(std::string_view name);
std::string_view to_string(PolicyKind k);
PolicyKind policy_kind_from_string(std::string_view name);

struct EnvironmentSpec {
  GeneratorKind kind = GeneratorKind::kGridworld;
  Index width = 4;  // gridworld
  Index height = 4;
  Index num_states = 6;  // every other generator
  Index num_actions = 2;
  double slip = 0.0;
  double gamma = 0.9;
  PolicyKind policy = PolicyKind::kUniform;
  double policy_floor = 1e-3;  // mixing weight of the uniform policy
  double logit_scale = 1.0;
  std::uint64_t seed = 0;

  bool deterministic_by_construction() const;
  /// Short human-readable tag, e.g. "gridworld4x4", "random_stochastic8x3".
  std::string label() const;
};

nlohmann::json spec_to_json(const EnvironmentSpec& spec);
EnvironmentSpec spec_from_json(const nlohmann::json& j);

struct Environment {
  EnvironmentSpec spec;
  Mdp mdp;
  Policy pi0;
  StateActionWeights weights;
  int reseeds = 0;  // extra draws needed to reach an ergodic chain
};

inline constexpr int kMaxReseeds = 10;

/// Builds the MDP and reference policy and computes rho. Randomized
/// generators are redrawn (up to 10 times) until the chain is ergodic;
/// afterwards a NumericalError carries the diagnostic.
Environment generate_environment(const EnvironmentSpec& spec);

/// Environment file: {"spec": ..., "mdp": ..., "policy": ..., "rho": [...]}.
nlohmann::json environment_to_json(const Environment& env);
/// Reads the MDP and policy as stored (so hand-written files work) and
/// recomputes rho. "spec" is optional and only used for labelling.
Environment environment_from_json(const nlohmann::json& j);

/// Independent stream for cell `index` of a run seeded with `master`.
Rng cell_rng(std::uint64_t master, std::uint64_t index);

}  // namespace rsf::lab
