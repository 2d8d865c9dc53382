#include "rsf/lab/config.hpp"

#include "rsf/mdp_io.hpp"

#include <algorithm>

namespace rsf::lab {

SuiteConfig default_suite(std::uint64_t seed) {
  SuiteConfig c;
  EnvironmentSpec grid;
  grid.kind = GeneratorKind::kGridworld;
  grid.width = 4;
  grid.height = 4;
  grid.policy = PolicyKind::kSoftmaxRandomLogits;
  grid.seed = seed;

  EnvironmentSpec cycle;
  cycle.kind = GeneratorKind::kDirectedCycle;
  cycle.num_states = 6;
  cycle.num_actions = 2;
  cycle.policy = PolicyKind::kSoftmaxRandomLogits;
  cycle.seed = seed;

  EnvironmentSpec random;
  random.kind = GeneratorKind::kRandomStochastic;
  random.num_states = 8;
  random.num_actions = 3;
  random.policy = PolicyKind::kSoftmaxRandomLogits;
  random.seed = seed;

  c.environments = {grid, cycle, random};
  c.params.seed = seed;
  return c;
}

nlohmann::json params_to_json(const VerifyParams& p) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : p.models) models.push_back(reward_model_to_json(m));
  return {{"gammas", p.gammas},
          {"temperatures", p.temperatures},
          {"dims", p.dims},
          {"models", models},
          {"n_mc", p.n_mc},
          {"n_moment", p.n_moment},
          {"n_feature_sets", p.n_feature_sets},
          {"n_functions", p.n_functions},
          {"n_competitors", p.n_competitors},
          {"n_fit", p.n_fit},
          {"mc_temperature_factor", p.mc_temperature_factor},
          {"seed", p.seed}};
}

VerifyParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("params: expected a JSON object");
  VerifyParams p;
  auto take = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  try {
    take("gammas", p.gammas);
    take("temperatures", p.temperatures);
    take("dims", p.dims);
    take("n_mc", p.n_mc);
    take("n_moment", p.n_moment);
    take("n_feature_sets", p.n_feature_sets);
    take("n_functions", p.n_functions);
    take("n_competitors", p.n_competitors);
    take("n_fit", p.n_fit);
    take("mc_temperature_factor", p.mc_temperature_factor);
    take("seed", p.seed);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("params: ") + e.what());
  }
  if (j.contains("models")) {
    p.models.clear();
    for (const auto& m : j.at("models")) p.models.push_back(reward_model_from_json(m));
  }
  return p;
}

nlohmann::json suite_to_json(const SuiteConfig& c) {
  nlohmann::json envs = nlohmann::json::array();
  for (const auto& s : c.environments) envs.push_back(spec_to_json(s));
  nlohmann::json checks = nlohmann::json::array();
  for (CheckId id : c.checks) checks.push_back(std::string(to_string(id)));
  return {{"environments", envs}, {"params", params_to_json(c.params)}, {"checks", checks}};
}

SuiteConfig suite_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("environments")) throw DomainError("suite config: missing \"environments\"");
  SuiteConfig c;
  for (const auto& s : j.at("environments")) c.environments.push_back(spec_from_json(s));
  if (c.environments.empty()) throw DomainError("suite config: no environments");
  if (j.contains("params")) c.params = params_from_json(j.at("params"));
  if (j.contains("checks")) {
    c.checks.clear();
    for (const auto& id : j.at("checks")) c.checks.push_back(check_from_string(id.get<std::string>()));
  }
  return c;
}

SuiteConfig load_suite(const std::filesystem::path& path) { return suite_from_json(io::read_json(path)); }

bool SuiteResult::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

SuiteResult run_suite(const SuiteConfig& config) {
  SuiteResult out;
  for (const auto& spec : config.environments) {
    const Environment env = generate_environment(spec);
    for (CheckId check : config.checks) {
      if (std::string why = inapplicable_reason(check, env); !why.empty()) {
        out.skipped.push_back({check, env_tag(spec), std::move(why)});
        continue;
      }
      auto rows = verify(check, env, config.params);
      out.rows.insert(out.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
  }
  sort_rows(out.rows);
  return out;
}

std::size_t suite_row_count(const SuiteConfig& config) {
  std::size_t n = 0;
  for (const auto& spec : config.environments) {
    const Environment env = generate_environment(spec);
    for (CheckId check : config.checks) n += expected_row_count(check, env, config.params);
  }
  return n;
}

}  // namespace rsf::lab
