#include "oracles.hpp"
#include "rsf/advantage_kernel.hpp"
#include "rsf/errors.hpp"
#include "rsf/geometry.hpp"
#include "rsf/rewards.hpp"

#include <gtest/gtest.h>

using namespace rsf;

namespace {

StateActionWeights uniform_weights(Index n) { return StateActionWeights(Vector::Constant(n, 1.0 / n), 1); }

/// Entrywise Monte-Carlo mean and SE of r r^T.
void mc_second_moment(const RewardModel& model, const StateActionWeights& w, int n, Rng& rng, Matrix& mean,
                      Matrix& se) {
  const Index k = w.size();
  Matrix s1 = Matrix::Zero(k, k), s2 = Matrix::Zero(k, k);
  for (int i = 0; i < n; ++i) {
    const Vector r = sample_reward(model, w, rng).reward;
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b) {
        s1(a, b) += r(a) * r(b);
        s2(a, b) += r(a) * r(a) * r(b) * r(b);
      }
  }
  mean = s1 / n;
  se = (((s2 / n).array() - mean.array().square()) * (n / (n - 1.0)) / n).sqrt().matrix();
}

}  // namespace

TEST(RewardModel, ValidationAndLabels) {
  EXPECT_THROW(RewardModel::scattered(0.0, 1.0, 1.0).validate(), DomainError);
  EXPECT_THROW(RewardModel::scattered(1.0, 1.0, -1.0).validate(), DomainError);
  EXPECT_NO_THROW(RewardModel::scattered(3.0, 1.0, 0.0).validate());
  EXPECT_EQ(RewardModel::gaussian().label(), "gaussian");
  EXPECT_EQ(RewardModel::goal().label(), "goal");
  EXPECT_EQ(reward_kind_from_string("goal"), RewardKind::kGoal);
  EXPECT_THROW(reward_kind_from_string("sparse"), DomainError);
}

TEST(RewardModel, JsonRoundTrip) {
  const RewardModel m = RewardModel::scattered(2.0, -0.5, 0.25, WeightLaw::kUniform);
  const nlohmann::json j = reward_model_to_json(m);
  EXPECT_EQ(j.at("kind").get<std::string>(), "scattered");
  const RewardModel back = reward_model_from_json(j);
  EXPECT_EQ(back.kappa, 2.0);
  EXPECT_EQ(back.mu, -0.5);
  EXPECT_EQ(back.sigma2, 0.25);
  EXPECT_EQ(back.weight_law, WeightLaw::kUniform);
  EXPECT_THROW(reward_model_from_json({{"kind", "scattered"}, {"kappa", -1.0}}), DomainError);
}

TEST(Sample, GoalHasSingleScaledDirac) {
  const auto env = fixtures::stochastic(4, 2, 1);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const RewardSample s = sample_reward(RewardModel::goal(), env.weights, rng);
    ASSERT_TRUE(s.goal.has_value());
    const Index g = *s.goal;
    EXPECT_EQ((s.reward.array() != 0.0).count(), 1);
    EXPECT_EQ(s.reward(g), 1.0 / env.weights.rho()(g));
    EXPECT_EQ(rho_integral(s, env.weights), 1.0);
  }
}

TEST(Sample, ScatteredSupportAndCollisions) {
  const auto env = fixtures::stochastic(2, 1, 2);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const RewardSample s = sample_reward(RewardModel::scattered(5.0, 1.0, 1.0), env.weights, rng);
    EXPECT_LE((s.reward.array() != 0.0).count(), static_cast<Index>(s.points.size()));
    Vector rebuilt = Vector::Zero(2);
    for (const auto& p : s.points) rebuilt(p.index) += p.weight / env.weights.rho()(p.index);
    EXPECT_LE((rebuilt - s.reward).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Sample, VanishingIntensityGivesZero) {
  const auto w = uniform_weights(4);
  Rng rng(3);
  const RewardSample s = sample_reward(RewardModel::scattered(1e-300, 1.0, 1.0), w, rng);
  EXPECT_TRUE(s.points.empty());
  EXPECT_EQ(s.reward.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sample, DeterministicForSeed) {
  const auto env = fixtures::stochastic(3, 2, 3);
  Rng a(42), b(42);
  for (const auto& m : {RewardModel::gaussian(), RewardModel::goal(), RewardModel::scattered(3, 1, 1)}) {
    EXPECT_EQ(sample_reward(m, env.weights, a).reward, sample_reward(m, env.weights, b).reward);
  }
}

TEST(Sample, GaussianVarianceOnUniformRho) {
  const Index n = 5;
  const auto w = uniform_weights(n);
  Rng rng(4);
  const int draws = 100000;
  Vector sum = Vector::Zero(n), sq = Vector::Zero(n), quad = Vector::Zero(n);
  for (int i = 0; i < draws; ++i) {
    const Vector r = sample_reward(RewardModel::gaussian(), w, rng).reward;
    sq += r.cwiseAbs2();
    quad += r.array().pow(4).matrix();
  }
  for (Index i = 0; i < n; ++i) {
    const double var = sq(i) / draws;
    const double se = std::sqrt((quad(i) / draws - var * var) / draws);
    EXPECT_LE(std::abs(var - static_cast<double>(n)), 3.0 * se);
  }
}

TEST(SecondMoment, ClosedForms) {
  const auto env = fixtures::stochastic(3, 2, 5);
  const Matrix inv = env.weights.rho().cwiseInverse().asDiagonal();
  EXPECT_EQ(second_moment(RewardModel::gaussian(), env.weights), inv);
  EXPECT_EQ(second_moment(RewardModel::goal(), env.weights), inv);
  EXPECT_LE((second_moment(RewardModel::scattered(2.0, 0.0, 0.7), env.weights) - 1.4 * inv).cwiseAbs().maxCoeff(),
            1e-12);
  const auto w = uniform_weights(2);
  Matrix expected(2, 2);
  expected << 3 * 2 + 4, 4, 4, 3 * 2 + 4;
  EXPECT_LE((second_moment(RewardModel::scattered(2.0, 1.0, 0.5), w) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SecondMoment, ScatteredMonteCarloTwoPoints) {
  const auto w = uniform_weights(2);
  const RewardModel model = RewardModel::scattered(2.0, 1.0, 0.5);
  Rng rng(6);
  Matrix mean, se;
  mc_second_moment(model, w, 1000000, rng, mean, se);
  const Matrix closed = second_moment(model, w);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) EXPECT_LE(std::abs(mean(i, j) - closed(i, j)), 3.0 * se(i, j)) << i << "," << j;
}

TEST(SecondMoment, UniformWeightLaw) {
  const auto w = uniform_weights(2);
  const RewardModel model = RewardModel::scattered(1.5, 0.5, 2.0, WeightLaw::kUniform);
  Rng rng(7);
  Matrix mean, se;
  mc_second_moment(model, w, 400000, rng, mean, se);
  const Matrix closed = second_moment(model, w);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) EXPECT_LE(std::abs(mean(i, j) - closed(i, j)), 3.0 * se(i, j));
}

TEST(FirstMoment, MatchesMonteCarlo) {
  const auto env = fixtures::stochastic(2, 2, 8);
  Rng rng(8);
  for (const auto& m : {RewardModel::gaussian(), RewardModel::goal(), RewardModel::scattered(3, 1, 1)}) {
    const Vector mu = first_moment(m, env.weights);
    for (Index i = 0; i < 4; ++i) {
      const auto est = oracle::mc_mean([&](Rng& g) { return sample_reward(m, env.weights, g).reward(i); }, 200000, rng);
      EXPECT_LE(std::abs(est.mean - mu(i)), 3.0 * est.se + 1e-12) << m.label() << " " << i;
    }
  }
}

TEST(ExpectedQuadratic, SpecialCases) {
  const auto env = fixtures::stochastic(3, 2, 9);
  EXPECT_EQ(expected_quadratic(Matrix::Zero(6, 6), RewardModel::gaussian(), env.weights), 0.0);
  EXPECT_NEAR(expected_quadratic(env.weights.rho_hat(), RewardModel::gaussian(), env.weights), 6.0, 1e-12);
  EXPECT_THROW(expected_quadratic(Matrix::Zero(5, 5), RewardModel::gaussian(), env.weights), ShapeError);
}

TEST(ExpectedQuadratic, TraceOfSecondMoment) {
  const auto env = fixtures::stochastic(3, 2, 10);
  Rng rng(10);
  Matrix m(6, 6);
  for (Index i = 0; i < 36; ++i) m.data()[i] = std::normal_distribution<double>()(rng);
  m = (m + m.transpose()).eval();
  for (const auto& model : {RewardModel::gaussian(), RewardModel::scattered(3, 1, 1)}) {
    EXPECT_NEAR(expected_quadratic(m, model, env.weights), (m * second_moment(model, env.weights)).trace(), 1e-9);
  }
}

TEST(ExpectedQuadratic, KernelUnderGoalModelMatchesMonteCarlo) {
  const auto env = fixtures::stochastic(3, 2, 11);
  const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
  const double exact = expected_quadratic(k.kernel(), RewardModel::goal(), env.weights);
  Rng rng(11);
  const auto est = oracle::mc_mean(
      [&](Rng& g) {
        const Vector r = sample_reward(RewardModel::goal(), env.weights, g).reward;
        return advantage_norm_sq(q_function(env.mdp, env.pi0, r), env.weights, env.pi0);
      },
      10000, rng);
  EXPECT_LE(std::abs(est.mean - exact), 3.0 * est.se);
}
