#include "rsf/lab/verify.hpp"

#include "rsf/advantage_kernel.hpp"
#include "rsf/features.hpp"
#include "rsf/geometry.hpp"
#include "rsf/lab/stats.hpp"
#include "rsf/successor_features.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rsf::lab {

std::string_view to_string(CheckId c) {
  static constexpr std::string_view kNames[] = {"V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8", "V9"};
  return kNames[static_cast<int>(c)];
}

CheckId check_from_string(std::string_view name) {
  for (CheckId c : all_checks()) {
    if (name == to_string(c)) return c;
  }
  throw DomainError("unknown check: " + std::string(name));
}

std::vector<CheckId> all_checks() {
  return {CheckId::V1, CheckId::V2, CheckId::V3, CheckId::V4, CheckId::V5,
          CheckId::V6, CheckId::V7, CheckId::V8, CheckId::V9};
}

std::vector<CheckId> parse_check_list(std::string_view list) {
  std::vector<CheckId> out;
  std::string item;
  std::istringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (item == "all") return all_checks();
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(check_from_string(item));
      continue;
    }
    const int lo = static_cast<int>(check_from_string(item.substr(0, dash)));
    const int hi = static_cast<int>(check_from_string(item.substr(dash + 1)));
    if (lo > hi) throw DomainError("empty check range: " + item);
    for (int c = lo; c <= hi; ++c) out.push_back(static_cast<CheckId>(c));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw DomainError("no checks selected");
  return out;
}

std::string env_tag(const EnvironmentSpec& spec) { return spec.label() + "@" + std::to_string(spec.seed); }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool needs_deterministic(CheckId c) { return c == CheckId::V5 || c == CheckId::V6 || c == CheckId::V9; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// Each cell draws from its own stream, keyed by its parameters, so results do
// not depend on evaluation order.
Rng rng_for(const VerifyParams& p, CheckId c, const Environment& env, double gamma, Index d, std::string_view model) {
  std::ostringstream key;
  key.precision(17);
  key << to_string(c) << '|' << env_tag(env.spec) << '|' << gamma << '|' << d << '|' << model;
  return cell_rng(p.seed, fnv1a(key.str()));
}

Environment at_gamma(const Environment& env, double gamma) {
  Environment out = env;
  out.mdp = env.mdp.with_gamma(gamma);
  out.spec.gamma = gamma;
  return out;
}

std::vector<double> gammas_below_one(const VerifyParams& p) {
  std::vector<double> out;
  for (double g : p.gammas) {
    if (g >= 0.0 && g < 1.0) out.push_back(g);
  }
  return out;
}

std::vector<double> open_gammas(const VerifyParams& p) {
  std::vector<double> out;
  for (double g : p.gammas) {
    if (g > 0.0 && g < 1.0) out.push_back(g);
  }
  return out;
}

std::vector<Index> valid_dims(const VerifyParams& p, Index size) {
  std::vector<Index> out;
  for (Index d : p.dims) {
    if (d >= 1 && d <= size) out.push_back(d);
  }
  return out;
}

std::vector<RewardModel> unit_moment_models(const VerifyParams& p) {
  std::vector<RewardModel> out;
  for (const auto& m : p.models) {
    if (m.kind != RewardKind::kScattered) out.push_back(m);
  }
  return out;
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ReportRow base_row(CheckId c, const Environment& env, const VerifyParams& p) {
  ReportRow r;
  r.check_id = std::string(to_string(c));
  r.env = env_tag(env.spec);
  r.seed = p.seed;
  return r;
}

void stamp(std::vector<ReportRow>& rows, std::size_t from, double ms) {
  for (std::size_t i = from; i < rows.size(); ++i) rows[i].runtime_ms = ms;
}

StateActionFn normal_vector(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  StateActionFn v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

// Largest principal angle between the leading-d eigenspaces of two spectra.
// Each side is widened to its full tie cluster at position d, so degenerate
// eigenvalues never make the comparison basis-dependent.
double leading_space_angle(const SpectralResult& a, const SpectralResult& b, Index d, const StateActionWeights& w) {
  const Index ka = cluster_extent(a.eigenvalues, d);
  const Index kb = cluster_extent(b.eigenvalues, d);
  return largest_principal_angle(a.eigenvectors.leftCols(ka), b.eigenvectors.leftCols(kb), w);
}

// ---------------------------------------------------------------- V1
void run_v1(const Environment& env, const VerifyParams& p, std::vector<ReportRow>& rows) {
  const StateActionWeights& w = env.weights;
  const Index n = w.size();
  for (Index d : valid_dims(p, n)) {
    for (const RewardModel& model : unit_moment_models(p)) {
      Stopwatch clock;
      const std::size_t first = rows.size();
      Rng rng = rng_for(p, CheckId::V1, env, kMissing, d, model.label());
      const Matrix m = second_moment(model, w);
      const double predicted = static_cast<double>(n - d);
      bool pass = true;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      double sum = 0.0;
      std::vector<FeatureSet> sets;
      for (Index k = 0; k < p.n_feature_sets; ++k) {
        sets.push_back(random_features(w, d, rng));
        const Matrix residual = Matrix::Identity(n, n) - projector(sets.back()).matrix();
        // E ||(Id - Pi) r||^2 = Tr((Id - Pi)^T rho_hat (Id - Pi) E[r r^T]).
        const double value = (residual.transpose() * w.rho_hat() * residual * m).trace();
        pass = pass && std::abs(value - predicted) <= 1e-8;
        lo = std::min(lo, value);
        hi = std::max(hi, value);
        sum += value;
      }
      pass = pass && (hi - lo) < 1e-8;
      RunningStats mc;
      const FeatureSet& fs = sets.front();
      for (Index i = 0; i < p.n_mc; ++i) {
        const RewardSample s = sample_reward(model, w, rng);
        const StateActionFn gap = s.reward - fs.columns() * task_vector(fs, s);
        mc.add(l2rho_norm_sq(gap, w));
      }
      // E||r||^2 = S*A sets the scale of per-sample round-off; at d = S*A the gap is pure round-off.
      const double roundoff = 1e-12 * static_cast<double>(n);
      pass = pass && std::abs(mc.mean() - predicted) <= 3.0 * mc.standard_error() + roundoff;
      ReportRow r = base_row(CheckId::V1, env, p);
      r.d = d;
      r.model = model.label();
      r.exact = sum / static_cast<double>(p.n_feature_sets);
      r.predicted = predicted;
      r.mc_mean = mc.mean();
      r.mc_se = mc.standard_error();
      r.pass = pass;
      rows.push_back(r);
      stamp(rows, first, clock.elapsed_ms());
    }
  }
}

// ---------------------------------------------------------------- V2
// The reward is rescaled so that its advantage has sup-norm 1. Returns and
// predictions are jointly homogeneous in (r, T), so this fixes the meaning of
// the temperature grid relative to the size of the tilt f/T.
void run_v2(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  for (double gamma : gammas_below_one(p)) {
    const Environment env = at_gamma(base, gamma);
    const StateActionWeights& w = env.weights;
    const AdvantageKernel kernel = build_kernel(env.mdp, env.pi0, w, gamma);
    for (Index d : valid_dims(p, w.size())) {
      Stopwatch clock;
      const std::size_t first = rows.size();
      Rng rng = rng_for(p, CheckId::V2, env, gamma, d, "gaussian");
      StateActionFn r = sample_reward(RewardModel::gaussian(), w, rng).reward;
      const double scale = value_and_advantage(env.pi0, q_function(env.mdp, env.pi0, r)).second.cwiseAbs().maxCoeff();
      if (scale > 0.0) r /= scale;
      const StateActionFn q = q_function(env.mdp, env.pi0, r);
      const FeatureSet fs = optimal_features(kernel, d);
      const SuccessorFeatures sf = successor_feature_map(fs, env.mdp, env.pi0);
      const StateActionFn q_hat = q_estimate(sf, task_vector(fs, r));
      const double g0 = regularized_return(env.mdp, env.pi0, env.pi0, r, 1.0, w).value;
      std::vector<double> ts, res, floor;
      for (double t : p.temperatures) {
        const double g = tilted_return(env.mdp, env.pi0, q_hat, r, t, w).value;
        const double pred = first_order_prediction(q, q_hat, g0, t, gamma, w, env.pi0);
        ReportRow row = base_row(CheckId::V2, env, p);
        row.gamma = gamma;
        row.temperature = t;
        row.d = d;
        row.model = "gaussian";
        row.exact = g;
        row.predicted = pred;
        rows.push_back(row);
        ts.push_back(t);
        res.push_back(std::abs(g - pred));
        floor.push_back(10.0 * kEps * std::max(1.0, std::abs(g)) / (1.0 - gamma));
      }
      const auto slope = loglog_slope(ts, res, floor);
      // A residual that sits at rounding level for every T cannot be fitted;
      // it is consistent with any decay order.
      const bool all_floor = std::equal(res.begin(), res.end(), floor.begin(), std::less_equal<>());
      const bool pass = slope ? (*slope >= -2.5 && *slope <= -1.5) : all_floor;
      for (std::size_t i = first; i < rows.size(); ++i) rows[i].pass = pass;
      ReportRow fit = base_row(CheckId::V2, env, p);
      fit.check_id = "V2-fit";
      fit.gamma = gamma;
      fit.d = d;
      fit.model = "gaussian";
      fit.exact = slope.value_or(kMissing);
      fit.predicted = -2.0;
      fit.pass = pass;
      rows.push_back(fit);
      stamp(rows, first, clock.elapsed_ms());
    }
  }
}

// ---------------------------------------------------------------- V3
void run_v3(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  for (double gamma : gammas_below_one(p)) {
    const Environment env = at_gamma(base, gamma);
    const StateActionWeights& w = env.weights;
    const AdvantageKernel kernel = build_kernel(env.mdp, env.pi0, w, gamma);
    for (Index d : valid_dims(p, w.size())) {
      for (const RewardModel& model : p.models) {
        Stopwatch clock;
        const std::size_t first = rows.size();
        Rng rng = rng_for(p, CheckId::V3, env, gamma, d, model.label());
        // Random features keep phi_cst != 0, so the scattered-model correction is exercised.
        const FeatureSet fs = random_features(w, d, rng);
        const SuccessorFeatures sf = successor_feature_map(fs, env.mdp, env.pi0);
        const double num_trace = expected_gain_numerator(fs, kernel, model);
        const double num_moments = expected_gain_numerator_moments(fs, kernel, model);
        const double adv_scale = std::sqrt(std::max(0.0, expected_quadratic(kernel.kernel(), model, w)));
        const double t_scale = adv_scale > 0.0 ? adv_scale : 1.0;
        const double t_mc = p.mc_temperature_factor * t_scale;
        const double denom = 2.0 * t_mc * (1.0 - gamma);

        struct Kept {
          StateActionFn r, q, q_hat;
          double g0;
        };
        std::vector<Kept> kept;
        RunningStats mc;
        for (Index i = 0; i < p.n_mc; ++i) {
          const RewardSample s = sample_reward(model, w, rng);
          const StateActionFn q_hat = q_estimate(sf, task_vector(fs, s));
          const double g0 = w.rho().dot(s.reward) / (1.0 - gamma);
          mc.add(tilted_return(env.mdp, env.pi0, q_hat, s.reward, t_mc, w).value - g0);
          if (static_cast<Index>(kept.size()) < p.n_fit) {
            kept.push_back({s.reward, q_function(env.mdp, env.pi0, s.reward), q_hat, g0});
          }
        }
        ReportRow row = base_row(CheckId::V3, env, p);
        row.gamma = gamma;
        row.temperature = t_mc;
        row.d = d;
        row.model = model.label();
        row.exact = num_trace / denom;
        row.predicted = num_moments / denom;
        row.mc_mean = mc.mean();
        row.mc_se = mc.standard_error();
        row.pass = rel_diff(num_trace, num_moments) <= 1e-9 &&
                   std::abs(mc.mean() - row.exact) <= 3.0 * mc.standard_error();
        rows.push_back(row);

        // Decay of the mean absolute gap between pipeline gains and the
        // first-order formula on a fixed set of rewards, over the temperature
        // grid scaled like t_mc. Absolute values keep per-reward errors of
        // opposite sign from cancelling into a misleading fit.
        std::vector<double> ts, res, floor;
        for (double t0 : p.temperatures) {
          const double t = t0 * t_scale;
          double gap = 0.0, mag = 0.0;
          for (const Kept& k : kept) {
            const double g = tilted_return(env.mdp, env.pi0, k.q_hat, k.r, t, w).value;
            gap += std::abs(g - first_order_prediction(k.q, k.q_hat, k.g0, t, gamma, w, env.pi0));
            mag = std::max(mag, std::abs(g));
          }
          ts.push_back(t);
          res.push_back(gap / static_cast<double>(std::max<std::size_t>(kept.size(), 1)));
          floor.push_back(10.0 * kEps * std::max(1.0, mag) / (1.0 - gamma));
        }
        const auto slope = loglog_slope(ts, res, floor);
        const bool all_floor = std::equal(res.begin(), res.end(), floor.begin(), std::less_equal<>());
        ReportRow fit = base_row(CheckId::V3, env, p);
        fit.check_id = "V3-fit";
        fit.gamma = gamma;
        fit.d = d;
        fit.model = model.label();
        fit.exact = slope.value_or(kMissing);
        fit.predicted = -2.0;
        fit.pass = slope ? *slope <= -1.9 : all_floor;
        rows.push_back(fit);
        stamp(rows, first, clock.elapsed_ms());
      }
    }
  }
}

// ---------------------------------------------------------------- V4
void run_v4(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  for (double gamma : gammas_below_one(p)) {
    const Environment env = at_gamma(base, gamma);
    const StateActionWeights& w = env.weights;
    const AdvantageKernel kernel = build_kernel(env.mdp, env.pi0, w, gamma);
    const SpectralResult spectrum = kernel_spectrum(kernel);
    for (Index d : valid_dims(p, w.size())) {
      Stopwatch clock;
      const std::size_t first = rows.size();
      Rng rng = rng_for(p, CheckId::V4, env, gamma, d, "");
      const double optimal = trace_gain(optimal_features(kernel, d), kernel);
      const double top_sum = spectrum.eigenvalues.head(d).sum();
      double best = -std::numeric_limits<double>::infinity();
      for (Index k = 0; k < p.n_competitors; ++k) best = std::max(best, trace_gain(random_features(w, d, rng), kernel));
      for (BaselineKind kind : {BaselineKind::kLaplacian, BaselineKind::kPSymmetrized}) {
        best = std::max(best, trace_gain(baseline_features(kind, env.mdp, env.pi0, w, d, rng), kernel));
      }
      ReportRow row = base_row(CheckId::V4, env, p);
      row.gamma = gamma;
      row.d = d;
      row.exact = optimal;
      row.predicted = top_sum;
      row.mc_mean = best;
      row.pass = std::abs(optimal - top_sum) <= 1e-8 && best <= optimal + 1e-8;
      rows.push_back(row);
      stamp(rows, first, clock.elapsed_ms());
    }
  }
}

// ---------------------------------------------------------------- V5
void run_v5(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  const std::vector<double> gammas = open_gammas(p);
  for (double gamma : gammas) {
    const Environment env = at_gamma(base, gamma);
    const StateActionWeights& w = env.weights;
    const AdvantageKernel kernel = build_kernel(env.mdp, env.pi0, w, gamma);
    const RhoOperator closed = closed_form_operator(env.mdp, env.pi0, w, gamma);
    const RhoOperator alt = alt_form_operator(env.mdp, env.pi0, w, gamma);
    {
      Stopwatch clock;
      const std::size_t first = rows.size();
      Rng rng = rng_for(p, CheckId::V5, env, gamma, -1, "forms");
      double worst = 0.0;
      for (Index k = 0; k < p.n_functions; ++k) {
        const StateActionFn r = normal_vector(w.size(), rng);
        const double a = kernel_quadratic(kernel, r);
        const double b = closed.form(r, r);
        const double c = alt.form(r, r);
        worst = std::max({worst, rel_diff(a, b), rel_diff(a, c), rel_diff(b, c)});
      }
      ReportRow row = base_row(CheckId::V5, env, p);
      row.check_id = "V5-forms";
      row.gamma = gamma;
      row.exact = worst;
      row.predicted = 0.0;
      row.pass = worst <= 1e-9;
      rows.push_back(row);
      stamp(rows, first, clock.elapsed_ms());
    }
    const SpectralResult optimal = kernel_spectrum(kernel);
    const SpectralResult closed_spec = centered_spectrum(closed.matrix(), w, "closed_form", 0.0);
    for (Index d : valid_dims(p, w.size())) {
      Stopwatch clock;
      const std::size_t first = rows.size();
      ReportRow row = base_row(CheckId::V5, env, p);
      row.gamma = gamma;
      row.d = d;
      row.exact = leading_space_angle(optimal, closed_spec, d, w);
      row.predicted = 0.0;
      row.pass = row.exact <= 1e-6;
      rows.push_back(row);
      stamp(rows, first, clock.elapsed_ms());
    }
  }
  if (gammas.empty()) return;
  // Limits: the largest gamma against the gamma = 1 operator on L2_0, the
  // smallest against Id - P* P. Constants get -infinity so they are never leading.
  const double lo = *std::min_element(gammas.begin(), gammas.end());
  const double hi = *std::max_element(gammas.begin(), gammas.end());
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (auto [gamma, limit] : {std::pair{hi, 1.0}, std::pair{lo, 0.0}}) {
    const bool applies = limit == 1.0 ? gamma >= 0.99 : gamma <= 0.01;
    if (!applies) continue;
    const Environment env = at_gamma(base, gamma);
    const StateActionWeights& w = env.weights;
    const SpectralResult optimal = kernel_spectrum(build_kernel(env.mdp, env.pi0, w, gamma));
    const SpectralResult reference =
        centered_spectrum(closed_form_operator(env.mdp, env.pi0, w, limit).matrix(), w, "limit", neg_inf);
    for (Index d : valid_dims(p, w.size())) {
      Stopwatch clock;
      const std::size_t first = rows.size();
      ReportRow row = base_row(CheckId::V5, env, p);
      row.check_id = limit == 1.0 ? "V5-limit1" : "V5-limit0";
      row.gamma = gamma;
      row.d = d;
      row.exact = leading_space_angle(optimal, reference, d, w);
      row.predicted = 0.0;
      row.pass = row.exact <= 0.05;
      rows.push_back(row);
      stamp(rows, first, clock.elapsed_ms());
    }
  }
}

// ---------------------------------------------------------------- V6
void run_v6(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  for (double gamma : gammas_below_one(p)) {
    const Environment env = at_gamma(base, gamma);
    Stopwatch clock;
    const std::size_t first = rows.size();
    Rng rng = rng_for(p, CheckId::V6, env, gamma, -1, "");
    double worst = 0.0;
    for (Index k = 0; k < p.n_functions; ++k) {
      const StateActionFn f = normal_vector(env.weights.size(), rng);
      const NormIdentities id = advantage_norm_identities(f, env.mdp, env.pi0, env.weights, gamma);
      worst = std::max(worst, rel_diff(id.advantage, id.first));
      if (id.second) worst = std::max({worst, rel_diff(id.advantage, *id.second), rel_diff(id.first, *id.second)});
    }
    ReportRow row = base_row(CheckId::V6, env, p);
    row.gamma = gamma;
    row.exact = worst;
    row.predicted = 0.0;
    row.pass = worst <= 1e-9;
    rows.push_back(row);
    stamp(rows, first, clock.elapsed_ms());
  }
}

// ---------------------------------------------------------------- V7
// Every distinct entry of E[r r^T] is compared with its closed form. The
// acceptance band is 3 sigma for the family of entries (two-sided level
// 0.0027 split evenly across the tested entries). Entries with zero sample
// variance must match exactly. An entry whose mean rests on fewer than
// kMinHits nonzero products is a rare-event estimate: its sampling
// distribution is strongly skewed and the estimated SE understates the
// lower tail, so it is left out of the band unless its closed form is 0.
constexpr double kMinHits = 300.0;

void run_v7(const Environment& env, const VerifyParams& p, std::vector<ReportRow>& rows) {
  const StateActionWeights& w = env.weights;
  const Index n = w.size();
  for (const RewardModel& model : p.models) {
    Stopwatch clock;
    const std::size_t first = rows.size();
    Rng rng = rng_for(p, CheckId::V7, env, kMissing, -1, model.label());
    Matrix s1 = Matrix::Zero(n, n);
    Matrix s2 = Matrix::Zero(n, n);
    Matrix hits = Matrix::Zero(n, n);
    RunningStats trace, count, factorial;
    for (Index i = 0; i < p.n_moment; ++i) {
      const RewardSample s = sample_reward(model, w, rng);
      const Matrix outer = s.reward * s.reward.transpose();
      s1 += outer;
      s2.array() += outer.array().square();
      hits.array() += (outer.array() != 0.0).cast<double>();
      trace.add(w.rho().dot(s.reward.cwiseAbs2()));
      const double k = static_cast<double>(s.points.size());
      count.add(k);
      factorial.add(k * (k - 1.0));
    }
    const double m = static_cast<double>(p.n_moment);
    const Matrix mean = s1 / m;
    const Matrix var = ((s2 / m).array() - mean.array().square()).matrix() * (m / (m - 1.0));
    const Matrix closed = second_moment(model, w);
    double worst_z = 0.0;
    bool exact_ok = true;
    Index noisy = 0;
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i <= j; ++i) {
        const double se = std::sqrt(std::max(0.0, var(i, j)) / m);
        const double diff = std::abs(mean(i, j) - closed(i, j));
        if (se == 0.0 && (hits(i, j) >= kMinHits || closed(i, j) == 0.0)) {
          exact_ok = exact_ok && diff <= 1e-12 * std::max(1.0, std::abs(closed(i, j)));
        } else if (se > 0.0 && hits(i, j) >= kMinHits) {
          ++noisy;
          worst_z = std::max(worst_z, diff / se);
        }
      }
    }
    const double band = noisy > 0 ? two_sided_normal_quantile(0.0027 / static_cast<double>(noisy)) : 3.0;
    ReportRow row = base_row(CheckId::V7, env, p);
    row.model = model.label();
    row.exact = worst_z;
    row.predicted = band;
    row.mc_mean = trace.mean();
    row.mc_se = trace.standard_error();
    row.pass = exact_ok && worst_z <= band;
    rows.push_back(row);
    if (model.kind == RewardKind::kScattered) {
      ReportRow nrow = base_row(CheckId::V7, env, p);
      nrow.check_id = "V7-N";
      nrow.model = model.label();
      nrow.exact = model.kappa;
      nrow.mc_mean = count.mean();
      nrow.mc_se = count.standard_error();
      nrow.pass = std::abs(count.mean() - model.kappa) <= 3.0 * count.standard_error();
      rows.push_back(nrow);
      ReportRow frow = nrow;
      frow.check_id = "V7-N(N-1)";
      frow.exact = model.kappa * model.kappa;
      frow.mc_mean = factorial.mean();
      frow.mc_se = factorial.standard_error();
      frow.pass = std::abs(factorial.mean() - frow.exact) <= 3.0 * factorial.standard_error();
      rows.push_back(frow);
    }
    stamp(rows, first, clock.elapsed_ms());
  }
}

// ---------------------------------------------------------------- V8
void run_v8(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  for (double gamma : gammas_below_one(p)) {
    const Environment env = at_gamma(base, gamma);
    Stopwatch clock;
    const std::size_t first = rows.size();
    const AdvantageKernel kernel = build_kernel(env.mdp, env.pi0, env.weights, gamma);
    ReportRow row = base_row(CheckId::V8, env, p);
    row.gamma = gamma;
    row.exact = (kernel.kernel() * Vector::Ones(kernel.size())).cwiseAbs().maxCoeff();
    row.predicted = 0.0;
    row.pass = row.exact <= 1e-9;
    rows.push_back(row);
    stamp(rows, first, clock.elapsed_ms());
  }
}

// ---------------------------------------------------------------- V9
void run_v9(const Environment& base, const VerifyParams& p, std::vector<ReportRow>& rows) {
  for (double gamma : open_gammas(p)) {
    const Environment env = at_gamma(base, gamma);
    Stopwatch clock;
    const std::size_t first = rows.size();
    const StateActionWeights& w = env.weights;
    const RhoOperator closed = closed_form_operator(env.mdp, env.pi0, w, gamma);
    const RhoOperator alt = alt_form_operator(env.mdp, env.pi0, w, gamma);
    Rng rng = rng_for(p, CheckId::V9, env, gamma, -1, "");
    double worst = 0.0;
    for (Index k = 0; k < p.n_functions; ++k) {
      const StateActionFn r = normal_vector(w.size(), rng);
      worst = std::max(worst, rel_diff(closed.form(r, r), alt.form(r, r)));
    }
    ReportRow row = base_row(CheckId::V9, env, p);
    row.gamma = gamma;
    row.exact = worst;
    row.predicted = 0.0;
    row.pass = worst <= 1e-9;
    rows.push_back(row);
    stamp(rows, first, clock.elapsed_ms());
  }
}

void validate(const VerifyParams& p) {
  for (double g : p.gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw DomainError("verify: gamma values must lie in [0, 1]");
  }
  for (double t : p.temperatures) {
    if (!(t >= kMinTemperature)) throw DomainError("verify: temperatures must be at least 1e-6");
  }
  for (const auto& m : p.models) m.validate();
  if (p.n_mc < 2 || p.n_moment < 2) throw DomainError("verify: Monte-Carlo sample counts must be at least 2");
  if (p.n_feature_sets < 1 || p.n_functions < 1 || p.n_competitors < 0 || p.n_fit < 1) {
    throw DomainError("verify: counts must be positive");
  }
}

}  // namespace

std::string inapplicable_reason(CheckId check, const Environment& env) {
  if (needs_deterministic(check) && !is_deterministic(env.mdp)) {
    return std::string(to_string(check)) + " needs a deterministic environment; " + env_tag(env.spec) +
           " has stochastic transitions";
  }
  return {};
}

std::vector<ReportRow> verify(CheckId check, const EnvironmentSpec& spec, const VerifyParams& params) {
  return verify(check, generate_environment(spec), params);
}

std::vector<ReportRow> verify(CheckId check, const Environment& env, const VerifyParams& params) {
  validate(params);
  if (const std::string why = inapplicable_reason(check, env); !why.empty()) throw ConfigError(why);
  std::vector<ReportRow> rows;
  switch (check) {
    case CheckId::V1:
      run_v1(env, params, rows);
      break;
    case CheckId::V2:
      run_v2(env, params, rows);
      break;
    case CheckId::V3:
      run_v3(env, params, rows);
      break;
    case CheckId::V4:
      run_v4(env, params, rows);
      break;
    case CheckId::V5:
      run_v5(env, params, rows);
      break;
    case CheckId::V6:
      run_v6(env, params, rows);
      break;
    case CheckId::V7:
      run_v7(env, params, rows);
      break;
    case CheckId::V8:
      run_v8(env, params, rows);
      break;
    case CheckId::V9:
      run_v9(env, params, rows);
      break;
  }
  return rows;
}

std::size_t expected_row_count(CheckId check, const Environment& env, const VerifyParams& p) {
  if (!inapplicable_reason(check, env).empty()) return 0;
  const std::size_t dims = valid_dims(p, env.weights.size()).size();
  const std::size_t below = gammas_below_one(p).size();
  const std::vector<double> open = open_gammas(p);
  const std::size_t models = p.models.size();
  const std::size_t scattered =
      static_cast<std::size_t>(std::count_if(p.models.begin(), p.models.end(),
                                             [](const RewardModel& m) { return m.kind == RewardKind::kScattered; }));
  switch (check) {
    case CheckId::V1:
      return dims * unit_moment_models(p).size();
    case CheckId::V2:
      return below * dims * (p.temperatures.size() + 1);
    case CheckId::V3:
      return below * dims * models * 2;
    case CheckId::V4:
      return below * dims;
    case CheckId::V5: {
      std::size_t limits = 0;
      if (!open.empty()) {
        limits += *std::max_element(open.begin(), open.end()) >= 0.99 ? 1 : 0;
        limits += *std::min_element(open.begin(), open.end()) <= 0.01 ? 1 : 0;
      }
      return open.size() * (dims + 1) + limits * dims;
    }
    case CheckId::V6:
      return below;
    case CheckId::V7:
      return models + 2 * scattered;
    case CheckId::V8:
      return below;
    case CheckId::V9:
      return open.size();
  }
  return 0;
}

}  // namespace rsf::lab
