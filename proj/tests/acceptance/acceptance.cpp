// Acceptance run: eight end-to-end criteria with pinned tolerances and
// runtime budgets. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include "oracles.hpp"
#include "rsf/advantage_kernel.hpp"
#include "rsf/features.hpp"
#include "rsf/geometry.hpp"
#include "rsf/lab/stats.hpp"
#include "rsf/lab/verify.hpp"
#include "rsf/successor_features.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace rsf;
using namespace rsf::lab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // 0: no budget
  std::function<Outcome()> run;
};

EnvironmentSpec make_spec(GeneratorKind kind, Index states, Index actions, std::uint64_t seed,
                          PolicyKind policy = PolicyKind::kSoftmaxRandomLogits) {
  EnvironmentSpec s;
  s.kind = kind;
  s.num_states = states;
  s.num_actions = actions;
  s.policy = policy;
  s.seed = seed;
  return s;
}

EnvironmentSpec grid_spec(std::uint64_t seed) {
  EnvironmentSpec s;
  s.policy = PolicyKind::kSoftmaxRandomLogits;
  s.seed = seed;
  return s;
}

std::vector<EnvironmentSpec> deterministic_specs() {
  return {grid_spec(0), make_spec(GeneratorKind::kDirectedCycle, 6, 2, 1),
          make_spec(GeneratorKind::kRandomDeterministic, 7, 3, 2)};
}

/// Runs `checks` on every environment and summarizes the rows.
Outcome all_rows_pass(const std::vector<EnvironmentSpec>& specs, const std::vector<CheckId>& checks,
                      const VerifyParams& params) {
  Outcome out;
  std::size_t total = 0, failed = 0;
  std::string first_failure;
  for (const auto& spec : specs) {
    const Environment env = generate_environment(spec);
    for (CheckId c : checks) {
      for (const ReportRow& r : verify(c, env, params)) {
        ++total;
        if (r.pass) continue;
        ++failed;
        if (first_failure.empty()) {
          std::ostringstream os;
          os << "; first failure " << r.check_id << " " << r.env << " gamma=" << r.gamma << " d=" << r.d << " "
             << r.model << " exact=" << r.exact << " predicted=" << r.predicted << " mc=" << r.mc_mean
             << " se=" << r.mc_se;
          first_failure = os.str();
        }
      }
    }
  }
  out.pass = total > 0 && failed == 0;
  out.detail = std::to_string(total - failed) + "/" + std::to_string(total) + " rows pass" + first_failure;
  return out;
}

// ---------------------------------------------------------------------------

Outcome bellman_gap() {
  std::vector<EnvironmentSpec> specs;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto kind = i % 2 == 0 ? GeneratorKind::kRandomStochastic : GeneratorKind::kRandomDeterministic;
    specs.push_back(make_spec(kind, 4 + static_cast<Index>(i % 7), 2 + static_cast<Index>(i % 3), 100 + i));
  }
  VerifyParams p;
  p.gammas = {0.9};
  p.dims = {1, 2, 4, 8};
  p.models = {RewardModel::gaussian(), RewardModel::goal()};
  p.n_feature_sets = 5;
  p.n_mc = 10000;
  p.seed = 1;
  return all_rows_pass(specs, {CheckId::V1}, p);
}

Outcome gap_law() {
  constexpr double kGamma = 0.9;
  constexpr double kSlack = 1.0;  // c in G_g <= G_Q + c / T^2, advantages normalized to sup-norm 1
  Outcome out;
  int slopes_ok = 0, max_ok = 0;
  double slope_lo = 0.0, slope_hi = -10.0, worst_excess = -1e300;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto kind = i % 2 == 0 ? GeneratorKind::kRandomStochastic : GeneratorKind::kRandomDeterministic;
    EnvironmentSpec spec = make_spec(kind, 3 + static_cast<Index>(i % 6), 2 + static_cast<Index>(i % 3), 200 + i);
    spec.gamma = kGamma;
    const Environment env = generate_environment(spec);
    const Index n = env.mdp.size();
    Rng rng = cell_rng(2, i);
    Vector r = fixtures::random_vector(n, rng);
    Vector q = q_function(env.mdp, env.pi0, r);
    const double scale = value_and_advantage(env.pi0, q).second.cwiseAbs().maxCoeff();
    r /= scale;
    q /= scale;
    const Vector q_hat = q + fixtures::random_vector(n, rng, 0.5);
    const double g0 = env.weights.rho().dot(r) / (1.0 - kGamma);

    std::vector<double> ts, res, floors;
    bool maximal = true;
    for (int k = 4; k <= 12; ++k) {
      const double t = std::ldexp(1.0, k);
      const double g = tilted_return(env.mdp, env.pi0, q_hat, r, t, env.weights).value;
      ts.push_back(t);
      res.push_back(std::abs(g - first_order_prediction(q, q_hat, g0, t, kGamma, env.weights, env.pi0)));
      floors.push_back(10.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(g)) / (1.0 - kGamma));

      const double best = tilted_return(env.mdp, env.pi0, q, r, t, env.weights).value;
      for (int j = 0; j < 50; ++j) {
        Vector tilt = fixtures::random_vector(n, rng);
        if (j % 2 == 0) tilt += q;
        const double excess = tilted_return(env.mdp, env.pi0, tilt, r, t, env.weights).value - best;
        worst_excess = std::max(worst_excess, excess * t * t);
        maximal = maximal && excess <= kSlack / (t * t);
      }
    }
    const auto slope = loglog_slope(ts, res, floors);
    bool all_floor = !slope;
    for (std::size_t j = 0; j < res.size(); ++j) all_floor = all_floor && res[j] <= floors[j];
    if (slope) {
      slope_lo = std::min(slope_lo, *slope);
      slope_hi = std::max(slope_hi, *slope);
    }
    slopes_ok += (slope && *slope >= -2.5 && *slope <= -1.5) || all_floor;
    max_ok += maximal;
  }
  out.pass = slopes_ok == 20 && max_ok == 20;
  std::ostringstream os;
  os << slopes_ok << "/20 slopes in [-2.5,-1.5] (range " << slope_lo << " .. " << slope_hi << "), " << max_ok
     << "/20 maximal; max T^2 excess " << worst_excess << " vs slack " << kSlack;
  out.detail = os.str();
  return out;
}

Outcome expected_gain_formulas() {
  VerifyParams p;
  p.gammas = {0.5, 0.9};
  p.dims = {1, 2, 4, 8};
  p.models = {RewardModel::gaussian(), RewardModel::goal(), RewardModel::scattered(3.0, 1.0, 1.0)};
  p.n_mc = 10000;
  p.seed = 3;
  return all_rows_pass({grid_spec(3), make_spec(GeneratorKind::kRandomStochastic, 8, 3, 3)}, {CheckId::V3}, p);
}

Outcome dominance() {
  VerifyParams p;
  p.gammas = {0.5, 0.9, 0.999};
  p.dims = {1, 2, 4, 8};
  p.n_competitors = 2000;
  p.seed = 4;
  return all_rows_pass({grid_spec(4), make_spec(GeneratorKind::kDirectedCycle, 6, 2, 4),
                        make_spec(GeneratorKind::kRandomStochastic, 8, 3, 4)},
                       {CheckId::V4}, p);
}

Outcome closed_forms() {
  VerifyParams p;
  p.gammas = {0.001, 0.5, 0.9, 0.999};
  p.dims = {1, 2, 4, 8};
  p.n_functions = 100;
  p.seed = 5;
  return all_rows_pass(deterministic_specs(), {CheckId::V5, CheckId::V9}, p);
}

Outcome identities() {
  VerifyParams p;
  p.n_functions = 100;
  p.seed = 6;
  Outcome det = all_rows_pass(deterministic_specs(), {CheckId::V6}, p);
  std::vector<EnvironmentSpec> every = deterministic_specs();
  every.push_back(make_spec(GeneratorKind::kRandomStochastic, 8, 3, 6));
  every.push_back(make_spec(GeneratorKind::kReversibleWalk, 8, 1, 6));
  EnvironmentSpec slip = grid_spec(6);
  slip.slip = 0.2;
  every.push_back(slip);
  Outcome null = all_rows_pass(every, {CheckId::V8}, p);

  // Sharpness: a stochastic environment where the identity fails by a clear margin.
  const Environment env = generate_environment(make_spec(GeneratorKind::kRandomStochastic, 6, 2, 6));
  Rng rng(6);
  double smallest = 1e300;
  for (int i = 0; i < 100; ++i) {
    smallest = std::min(smallest, norm_identity_gap(fixtures::random_vector(env.mdp.size(), rng), env.mdp, env.pi0,
                                                    env.weights));
  }
  const bool sharp = smallest > 1e-6;
  Outcome out;
  out.pass = det.pass && null.pass && sharp;
  std::ostringstream os;
  os << "identities " << det.detail << "; nullity " << null.detail << "; stochastic gap min " << smallest;
  out.detail = os.str();
  return out;
}

Outcome second_moments() {
  constexpr Index kSamples = 100000;
  // Small chain with a near-uniform rho keeps every entry well populated.
  const Environment env =
      generate_environment(make_spec(GeneratorKind::kRandomStochastic, 3, 2, 7, PolicyKind::kUniform));
  const StateActionWeights& w = env.weights;
  const Index n = w.size();
  Outcome out;
  std::ostringstream os;
  int entries = 0, ok = 0;
  double worst_z = 0.0;
  for (const RewardModel& model :
       {RewardModel::gaussian(), RewardModel::goal(), RewardModel::scattered(3.0, 1.0, 1.0)}) {
    Rng rng = cell_rng(7, static_cast<std::uint64_t>(model.kind));
    std::vector<RunningStats> stats(static_cast<std::size_t>(n * n));
    RunningStats count, pairs;
    for (Index k = 0; k < kSamples; ++k) {
      const RewardSample s = sample_reward(model, w, rng);
      for (Index i = 0; i < n; ++i)
        for (Index j = i; j < n; ++j) stats[static_cast<std::size_t>(i * n + j)].add(s.reward(i) * s.reward(j));
      const double nn = static_cast<double>(s.points.size());
      count.add(nn);
      pairs.add(nn * (nn - 1.0));
    }
    const Matrix m = second_moment(model, w);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i; j < n; ++j) {
        const RunningStats& st = stats[static_cast<std::size_t>(i * n + j)];
        const double diff = std::abs(st.mean() - m(i, j));
        const double se = st.standard_error();
        const bool pass = se > 0.0 ? diff <= 3.0 * se : diff <= 1e-12 * std::max(1.0, std::abs(m(i, j)));
        if (se > 0.0) worst_z = std::max(worst_z, diff / se);
        ++entries;
        ok += pass;
      }
    }
    if (model.kind == RewardKind::kScattered) {
      const double kappa = model.kappa;
      const bool n_ok = std::abs(count.mean() - kappa) <= 3.0 * count.standard_error();
      const bool nn_ok = std::abs(pairs.mean() - kappa * kappa) <= 3.0 * pairs.standard_error();
      os << "E[N]=" << count.mean() << " (" << (n_ok ? "ok" : "off") << "), E[N(N-1)]=" << pairs.mean() << " ("
         << (nn_ok ? "ok" : "off") << "); ";
      out.pass = out.pass && n_ok && nn_ok;
    }
  }
  out.pass = out.pass && ok == entries;
  os << ok << "/" << entries << " entries within 3 SE, largest |z| " << worst_z;
  out.detail = os.str();
  return out;
}

Outcome separation() {
  constexpr Index kD = 2;
  // Directed cycle: optimal features (plus the constant) against the d+1
  // lowest Laplacian eigenfunctions, which always include the constant.
  const Environment cycle = generate_environment(make_spec(GeneratorKind::kDirectedCycle, 6, 2, 3));
  const AdvantageKernel k = build_kernel(cycle.mdp, cycle.pi0, cycle.weights, 0.9);
  const FeatureSet opt = optimal_features(k, kD);
  Matrix with_one(opt.size(), kD + 1);
  with_one << Vector::Ones(opt.size()), opt.columns();
  Rng rng(8);
  const FeatureSet lap =
      baseline_features(BaselineKind::kLaplacian, cycle.mdp, cycle.pi0, cycle.weights, kD + 1, rng);
  const double cycle_angle = largest_principal_angle(with_one, lap.columns(), cycle.weights);
  const Vector cycle_low = -laplacian_spectrum(cycle.mdp, cycle.pi0, cycle.weights).eigenvalues.reverse();
  const bool cycle_separated =
      separated_at(kernel_spectrum(k).eigenvalues, kD) && separated_at(cycle_low, kD + 1);

  // Reversible walk: eigenvectors of D + D* (D the centered inverse Laplacian)
  // against those of Delta + Delta*.
  const Environment walk = generate_environment(make_spec(GeneratorKind::kReversibleWalk, 8, 1, 4));
  const SpectralResult inv = centered_spectrum(
      inverse_symmetrized_operator(policy_transition(walk.mdp, walk.pi0), walk.weights).matrix(), walk.weights,
      "inverse_symmetrized", -std::numeric_limits<double>::infinity());
  const SpectralResult walk_lap = laplacian_spectrum(walk.mdp, walk.pi0, walk.weights);
  const Index n = walk.weights.size();
  Matrix inv_top(n, kD + 1);
  inv_top << Vector::Ones(n), inv.eigenvectors.leftCols(kD);
  // Ascending Laplacian eigenvalues, negated so that separated_at sees a descending list.
  const Vector walk_low = -walk_lap.eigenvalues.reverse();
  const bool walk_separated = separated_at(walk_low, kD + 1);
  const double walk_angle =
      largest_principal_angle(inv_top, walk_lap.eigenvectors.rightCols(kD + 1), walk.weights);

  Outcome out;
  out.pass = cycle_angle > 0.1 && cycle_separated && walk_angle <= 1e-6 && walk_separated;
  std::ostringstream os;
  os << "directed cycle angle " << cycle_angle << " (> 0.1)" << (cycle_separated ? "" : " [spectrum not separated]")
     << ", reversible walk angle " << walk_angle << " (<= 1e-6)" << (walk_separated ? "" : " [spectrum not separated]");
  out.detail = os.str();
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Bellman-gap invariance", 10.0, bellman_gap},
      {2, "optimality-gap law", 30.0, gap_law},
      {3, "expected-gain formulas", 60.0, expected_gain_formulas},
      {4, "optimal-feature dominance", 20.0, dominance},
      {5, "closed-form eigenstructure", 20.0, closed_forms},
      {6, "norm identities and nullity", 0.0, identities},
      {7, "reward second moments", 0.0, second_moments},
      {8, "optimal vs Laplacian separation", 0.0, separation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = c.budget_s <= 0.0 || secs <= c.budget_s;
    const bool pass = o.pass && in_budget;
    failures += !pass;
    std::printf("criterion %d %-32s %s  %.2fs", c.id, c.name.c_str(), pass ? "PASS" : "FAIL", secs);
    if (c.budget_s > 0.0) std::printf(" (budget %.0fs%s)", c.budget_s, in_budget ? "" : ", exceeded");
    std::printf("  %s\n", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
