#include "oracles.hpp"
#include "rsf/errors.hpp"
#include "rsf/lab/config.hpp"
#include "rsf/lab/sweep.hpp"
#include "rsf/lab/verify.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace rsf;
using namespace rsf::lab;

namespace {

/// A grid small enough for unit tests.
VerifyParams quick_params() {
  VerifyParams p;
  p.gammas = {0.5, 0.9};
  p.temperatures = {64, 256, 1024, 4096};
  p.dims = {1, 2};
  p.n_mc = 500;
  p.n_moment = 2000;
  p.n_feature_sets = 2;
  p.n_functions = 10;
  p.n_competitors = 10;
  p.n_fit = 5;
  return p;
}

std::vector<ReportRow> strip_runtime(std::vector<ReportRow> rows) {
  for (auto& r : rows) r.runtime_ms = 0.0;
  return rows;
}

}  // namespace

TEST(CheckNames, ParseAndPrint) {
  EXPECT_EQ(to_string(CheckId::V5), "V5");
  EXPECT_EQ(check_from_string("V9"), CheckId::V9);
  EXPECT_THROW(check_from_string("V10"), DomainError);
  EXPECT_EQ(all_checks().size(), 9u);
  EXPECT_EQ(parse_check_list("all"), all_checks());
  EXPECT_EQ(parse_check_list("V7,V1,V1"), (std::vector<CheckId>{CheckId::V1, CheckId::V7}));
  EXPECT_EQ(parse_check_list("V5-V7,V2"),
            (std::vector<CheckId>{CheckId::V2, CheckId::V5, CheckId::V6, CheckId::V7}));
  EXPECT_THROW(parse_check_list(""), DomainError);
  EXPECT_THROW(parse_check_list("V7-V5"), DomainError);
}

TEST(Verify, BellmanGapEqualsCodimension) {
  const auto env = fixtures::stochastic(5, 3, 0);
  VerifyParams p = quick_params();
  p.dims = {4};
  p.n_mc = 4000;
  const auto rows = verify(CheckId::V1, env, p);
  ASSERT_EQ(rows.size(), expected_row_count(CheckId::V1, env, p));
  for (const auto& r : rows) {
    EXPECT_NEAR(r.exact, 11.0, 1e-8) << r.model;
    EXPECT_EQ(r.predicted, 11.0);
    EXPECT_LE(std::abs(r.mc_mean - 11.0), 3.0 * r.mc_se) << r.model;
    EXPECT_TRUE(r.pass);
  }
}

TEST(Verify, NullityAndClosedForms) {
  const auto det = fixtures::deterministic(5, 2, 1);
  for (CheckId c : {CheckId::V5, CheckId::V6, CheckId::V8, CheckId::V9}) {
    const auto rows = verify(c, det, quick_params());
    EXPECT_EQ(rows.size(), expected_row_count(c, det, quick_params())) << to_string(c);
    for (const auto& r : rows) EXPECT_TRUE(r.pass) << r.check_id << " d=" << r.d << " gamma=" << r.gamma;
  }
}

TEST(Verify, SecondOrderDecay) {
  const auto env = fixtures::stochastic(4, 2, 2);
  const auto rows = verify(CheckId::V2, env, quick_params());
  ASSERT_EQ(rows.size(), expected_row_count(CheckId::V2, env, quick_params()));
  int fits = 0;
  for (const auto& r : rows) {
    EXPECT_TRUE(r.pass) << r.check_id << " T=" << r.temperature;
    fits += r.check_id == "V2-fit";
  }
  EXPECT_EQ(fits, 4);
}

TEST(Verify, DeterministicOnlyChecksRejectStochasticEnvironments) {
  const auto env = fixtures::stochastic(4, 2, 3);
  for (CheckId c : {CheckId::V5, CheckId::V6, CheckId::V9}) {
    EXPECT_FALSE(inapplicable_reason(c, env).empty());
    EXPECT_THROW(verify(c, env, quick_params()), ConfigError);
  }
  EXPECT_TRUE(inapplicable_reason(CheckId::V8, env).empty());
}

TEST(Verify, ParameterValidation) {
  const auto env = fixtures::stochastic(4, 2, 3);
  VerifyParams p = quick_params();
  p.gammas = {1.5};
  EXPECT_THROW(verify(CheckId::V8, env, p), DomainError);
  p = quick_params();
  p.temperatures = {-1.0};
  EXPECT_THROW(verify(CheckId::V2, env, p), DomainError);
}

TEST(Suite, RowCountAndReproducibility) {
  SuiteConfig c = default_suite(5);
  c.params = quick_params();
  c.params.seed = 5;
  c.checks = parse_check_list("V1,V2,V4-V9");
  const SuiteResult a = run_suite(c);
  EXPECT_EQ(a.rows.size(), suite_row_count(c));
  EXPECT_EQ(a.skipped.size(), 3u);  // V5, V6, V9 on the stochastic environment
  EXPECT_TRUE(a.all_pass());
  const SuiteResult b = run_suite(c);
  EXPECT_EQ(render_csv(strip_runtime(a.rows)), render_csv(strip_runtime(b.rows)));
}

TEST(Suite, ConfigJsonRoundTrip) {
  SuiteConfig c = default_suite(3);
  c.params.dims = {1, 3};
  c.params.models = {RewardModel::goal(), RewardModel::scattered(2.0, 0.5, 0.25)};
  c.checks = {CheckId::V2, CheckId::V8};
  const SuiteConfig back = suite_from_json(suite_to_json(c));
  EXPECT_EQ(suite_to_json(back), suite_to_json(c));
  EXPECT_EQ(back.environments.size(), 3u);

  const VerifyParams partial = params_from_json(nlohmann::json{{"n_mc", 7}});
  EXPECT_EQ(partial.n_mc, 7);
  EXPECT_EQ(partial.dims, VerifyParams{}.dims);
  EXPECT_THROW(suite_from_json(nlohmann::json::object()), DomainError);
}

TEST(Sweep, OptimalDominatesAndZeroFeaturesGainNothing) {
  const auto env = fixtures::stochastic(4, 3, 4);
  SweepParams p;
  p.dims = {0, 1, 3, 6};
  p.n_mc = 200;
  const auto rows = sweep_features(env, p);
  ASSERT_EQ(rows.size(), all_families().size() * p.dims.size());
  std::map<Index, double> optimal;
  for (const auto& r : rows)
    if (r.check_id == "sweep/optimal") optimal[r.d] = r.exact;
  for (const auto& r : rows) {
    EXPECT_TRUE(r.pass) << r.check_id << " d=" << r.d;
    EXPECT_LE(r.exact, optimal.at(r.d) + 1e-8 * std::max(1.0, std::abs(optimal.at(r.d))));
    if (r.d == 0) {
      EXPECT_EQ(r.exact, 0.0);
      EXPECT_EQ(r.mc_mean, 0.0);
    }
  }
  EXPECT_EQ(feature_family_from_string("laplacian"), FeatureFamily::kLaplacian);
  EXPECT_THROW(feature_family_from_string("pca"), DomainError);
}
