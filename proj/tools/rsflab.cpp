// rsflab: generate environments, extract features, run the verification
// suite, compare feature families and re-render reports.
//
// Exit codes: 0 all rows pass, 1 some row failed, 2 bad input or a check
// requested on an environment that does not meet its hypotheses.

#include "rsf/advantage_kernel.hpp"
#include "rsf/feature_set.hpp"
#include "rsf/features.hpp"
#include "rsf/lab/config.hpp"
#include "rsf/lab/environment.hpp"
#include "rsf/lab/report.hpp"
#include "rsf/lab/sweep.hpp"
#include "rsf/lab/verify.hpp"
#include "rsf/mdp_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

using namespace rsf;
using namespace rsf::lab;

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::string out;  // empty: stdout
  std::string format = "csv";
};

struct GenOptions {
  std::string kind = "gridworld";
  Index width = 4, height = 4, states = 6, actions = 2;
  double slip = 0.0, gamma = 0.9, floor = 1e-3, logit_scale = 1.0;
  std::string policy = "softmax_random_logits";
};

EnvironmentSpec spec_from(const GenOptions& o, std::uint64_t seed) {
  EnvironmentSpec s;
  s.kind = generator_from_string(o.kind);
  s.width = o.width;
  s.height = o.height;
  s.num_states = o.states;
  s.num_actions = o.kind == "reversible_walk" ? 1 : o.actions;
  s.slip = o.slip;
  s.gamma = o.gamma;
  s.policy = policy_kind_from_string(o.policy);
  s.policy_floor = o.floor;
  s.logit_scale = o.logit_scale;
  s.seed = seed;
  return s;
}

void add_gen_flags(CLI::App* cmd, GenOptions& o) {
  cmd->add_option("--kind", o.kind,
                  "gridworld | directed_cycle | random_deterministic | random_stochastic | reversible_walk")
      ->capture_default_str();
  cmd->add_option("--width", o.width, "gridworld width")->capture_default_str();
  cmd->add_option("--height", o.height, "gridworld height")->capture_default_str();
  cmd->add_option("--states", o.states, "number of states (non-grid generators)")->capture_default_str();
  cmd->add_option("--actions", o.actions, "number of actions (non-grid generators)")->capture_default_str();
  cmd->add_option("--slip", o.slip, "gridworld slip probability")->capture_default_str();
  cmd->add_option("--policy", o.policy, "uniform | softmax_random_logits")->capture_default_str();
  cmd->add_option("--floor", o.floor, "uniform mixing weight of softmax policies")->capture_default_str();
  cmd->add_option("--logit-scale", o.logit_scale, "std of random logits")->capture_default_str();
}

void write_text(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::FILE* f = std::fopen(g.out.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + g.out);
  std::fputs(text.c_str(), f);
  std::fclose(f);
}

void write_rows(const Globals& g, const std::vector<ReportRow>& rows) {
  const ReportFormat format = format_from_string(g.format);
  if (g.out.empty() || g.out == "-") {
    if (rows.empty()) throw DomainError("no rows to report");
    std::cout << (format == ReportFormat::kCsv ? render_csv(rows) : rows_to_json(rows).dump(2) + "\n");
    return;
  }
  emit_report(rows, format, g.out);
}

int exit_for(const std::vector<ReportRow>& rows) {
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.pass ? 0 : 1;
  std::cerr << rows.size() - failed << "/" << rows.size() << " rows pass\n";
  return failed == 0 ? 0 : kExitFail;
}

Environment load_or_generate(const std::string& env_file, const GenOptions& o, std::uint64_t seed) {
  if (!env_file.empty()) return environment_from_json(io::read_json(env_file));
  return generate_environment(spec_from(o, seed));
}

int run_features(const Globals& g, const Environment& base, const std::string& kind, Index d, double gamma) {
  const Mdp mdp = base.mdp.with_gamma(gamma);
  Rng rng = cell_rng(g.seed, 0);
  FeatureSet fs = [&] {
    if (kind == "optimal") return optimal_features(build_kernel(mdp, base.pi0, base.weights, gamma), d);
    if (kind == "closed_form") {
      const RhoOperator op = closed_form_operator(mdp, base.pi0, base.weights, gamma);
      return leading_eigenfeatures(centered_spectrum(op.matrix(), base.weights, "closed_form", 0.0), base.weights, d,
                                   Provenance::kClosedForm);
    }
    const FeatureFamily family = feature_family_from_string(kind);
    switch (family) {
      case FeatureFamily::kLaplacian:
        return baseline_features(BaselineKind::kLaplacian, mdp, base.pi0, base.weights, d, rng);
      case FeatureFamily::kPSymmetrized:
        return baseline_features(BaselineKind::kPSymmetrized, mdp, base.pi0, base.weights, d, rng);
      case FeatureFamily::kRandom:
        return random_features(base.weights, d, rng);
      case FeatureFamily::kOptimal:
        break;
    }
    return optimal_features(build_kernel(mdp, base.pi0, base.weights, gamma), d);
  }();
  write_text(g, feature_set_to_json(fs).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized successor features: environments, features and numerical checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write an environment file (MDP, policy, rho)");
  add_gen_flags(gen_cmd, gen);
  gen_cmd->add_option("--gamma", gen.gamma, "discount factor")->capture_default_str();

  GenOptions fgen;
  std::string f_env, f_kind = "optimal";
  Index f_d = 4;
  double f_gamma = 0.9;
  auto* feat_cmd = app.add_subcommand("features", "extract a feature family to JSON");
  feat_cmd->add_option("--env", f_env, "environment file from 'gen' (default: generate from flags)");
  feat_cmd->add_option("--kind", f_kind, "optimal | laplacian_eigs | p_symmetrized | random | closed_form")
      ->capture_default_str();
  feat_cmd->add_option("--d", f_d, "number of features")->capture_default_str();
  feat_cmd->add_option("--gamma", f_gamma, "discount factor")->capture_default_str();
  feat_cmd->add_option("--generator", fgen.kind, "generator when --env is absent")->capture_default_str();

  std::string v_checks = "all", v_suite = "default";
  auto* verify_cmd = app.add_subcommand("verify", "run verification checks V1..V9");
  verify_cmd->add_option("--checks", v_checks, "comma list or ranges, e.g. V1,V5-V7")->capture_default_str();
  verify_cmd->add_option("--suite", v_suite, "'default' or a suite config JSON file")->capture_default_str();

  GenOptions sgen;
  std::string s_env, s_model = "gaussian";
  double s_kappa = 3.0, s_mu = 1.0, s_sigma2 = 1.0, s_temp = 64.0, s_gamma = 0.9;
  std::vector<Index> s_dims{0, 1, 2, 4, 8};
  Index s_mc = 2000;
  auto* sweep_cmd = app.add_subcommand("sweep", "compare feature families by expected gain");
  sweep_cmd->add_option("--env", s_env, "environment file from 'gen' (default: generate from flags)");
  add_gen_flags(sweep_cmd, sgen);
  sweep_cmd->add_option("--model", s_model, "gaussian | goal | scattered")->capture_default_str();
  sweep_cmd->add_option("--kappa", s_kappa, "scattered: Poisson intensity")->capture_default_str();
  sweep_cmd->add_option("--mu", s_mu, "scattered: weight mean")->capture_default_str();
  sweep_cmd->add_option("--sigma2", s_sigma2, "scattered: weight variance")->capture_default_str();
  sweep_cmd->add_option("--d", s_dims, "feature counts")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--T", s_temp, "temperature")->capture_default_str();
  sweep_cmd->add_option("--gamma", s_gamma, "discount factor")->capture_default_str();
  sweep_cmd->add_option("--mc", s_mc, "Monte-Carlo rewards")->capture_default_str();

  std::string r_in;
  auto* report_cmd = app.add_subcommand("report", "re-render a stored JSON report");
  report_cmd->add_option("input", r_in, "JSON report")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const Environment env = generate_environment(spec_from(gen, g.seed));
      write_text(g, environment_to_json(env).dump(2) + "\n");
      return 0;
    }
    if (*feat_cmd) {
      return run_features(g, load_or_generate(f_env, fgen, g.seed), f_kind, f_d, f_gamma);
    }
    if (*verify_cmd) {
      SuiteConfig config = v_suite == "default" ? default_suite(g.seed) : load_suite(v_suite);
      const bool explicit_checks = v_checks != "all";
      if (explicit_checks) config.checks = parse_check_list(v_checks);
      const SuiteResult result = run_suite(config);
      for (const auto& s : result.skipped) std::cerr << "configuration error: " << s.reason << "\n";
      if (result.rows.empty()) {
        std::cerr << "no applicable (check, environment) cells\n";
        return kExitConfig;
      }
      write_rows(g, result.rows);
      const int code = exit_for(result.rows);
      if (code == 0 && explicit_checks && !result.skipped.empty()) return kExitConfig;
      return code;
    }
    if (*sweep_cmd) {
      SweepParams p;
      p.gamma = s_gamma;
      p.temperature = s_temp;
      p.dims = s_dims;
      p.n_mc = s_mc;
      p.seed = g.seed;
      const RewardKind kind = reward_kind_from_string(s_model);
      p.model = kind == RewardKind::kGaussian ? RewardModel::gaussian()
                : kind == RewardKind::kGoal   ? RewardModel::goal()
                                              : RewardModel::scattered(s_kappa, s_mu, s_sigma2);
      const auto rows = sweep_features(load_or_generate(s_env, sgen, g.seed), p);
      write_rows(g, rows);
      return exit_for(rows);
    }
    if (*report_cmd) {
      auto rows = rows_from_json(io::read_json(r_in));
      sort_rows(rows);
      write_rows(g, rows);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
