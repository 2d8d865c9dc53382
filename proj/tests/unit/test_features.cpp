#include "oracles.hpp"
#include "rsf/errors.hpp"
#include "rsf/features.hpp"
#include "rsf/geometry.hpp"

#include <gtest/gtest.h>

using namespace rsf;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST(OptimalFeatures, TraceEqualsEigenvalueSum) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto env = fixtures::stochastic(5, 3, seed);
    const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
    const SpectralResult sp = kernel_spectrum(k);
    for (Index d : {1, 2, 4, 8, 14}) {
      const FeatureSet fs = optimal_features(k, d);
      EXPECT_EQ(fs.dim(), d);
      EXPECT_EQ(fs.provenance(), Provenance::kOptimal);
      EXPECT_LE(rel(trace_gain(fs, k), sp.eigenvalues.head(d).sum()), 1e-10);
      EXPECT_LE((env.weights.rho().transpose() * fs.columns()).cwiseAbs().maxCoeff(), 1e-10);
    }
    const double full = (k.kernel() * env.weights.rho().cwiseInverse().asDiagonal()).trace();
    EXPECT_LE(rel(trace_gain(optimal_features(k, 15), k), full), 1e-9);
    EXPECT_THROW(optimal_features(k, 0), DomainError);
    EXPECT_THROW(optimal_features(k, 16), DomainError);
  }
}

TEST(OptimalFeatures, DominateRandomFeatures) {
  const auto env = fixtures::stochastic(4, 3, 5);
  const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
  Rng rng(5);
  for (Index d : {1, 3, 6}) {
    const double best = trace_gain(optimal_features(k, d), k);
    for (int i = 0; i < 100; ++i) EXPECT_LE(trace_gain(random_features(env.weights, d, rng), k), best + 1e-10);
  }
}

TEST(OptimalFeatures, TraceWithConstantColumn) {
  const auto env = fixtures::stochastic(4, 2, 6);
  const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
  Matrix cols(8, 2);
  cols.col(0) = Vector::Ones(8);
  cols.col(1) = optimal_features(k, 1).columns().col(0);
  const FeatureSet fs(cols, env.weights, Provenance::kCustom);
  EXPECT_LE(rel(trace_gain(fs, k), kernel_spectrum(k).eigenvalues(0)), 1e-10);
}

TEST(Baselines, LaplacianBottomIsConstant) {
  const auto env = fixtures::stochastic(5, 2, 7);
  Rng rng(7);
  const FeatureSet fs = baseline_features(BaselineKind::kLaplacian, env.mdp, env.pi0, env.weights, 1, rng);
  EXPECT_EQ(fs.provenance(), Provenance::kLaplacian);
  EXPECT_NEAR(std::abs(env.weights.rho().dot(fs.columns().col(0))), 1.0, 1e-9);
  const SpectralResult sp = laplacian_spectrum(env.mdp, env.pi0, env.weights);
  EXPECT_NEAR(sp.eigenvalues(sp.eigenvalues.size() - 1), 0.0, 1e-10);
}

TEST(Baselines, LaplacianAndSymmetrizedShareSpans) {
  const auto env = fixtures::stochastic(5, 2, 8);
  Rng rng(8);
  const SpectralResult ps = p_symmetrized_spectrum(env.mdp, env.pi0, env.weights);
  for (Index d : {1, 2, 3, 5}) {
    if (!separated_at(ps.eigenvalues, d)) continue;
    const FeatureSet a = baseline_features(BaselineKind::kLaplacian, env.mdp, env.pi0, env.weights, d, rng);
    const FeatureSet b = baseline_features(BaselineKind::kPSymmetrized, env.mdp, env.pi0, env.weights, d, rng);
    EXPECT_LE(subspace_distance(a, b), 1e-6) << d;
  }
}

TEST(Baselines, RandomFeaturesAreOrthonormal) {
  const auto env = fixtures::stochastic(5, 2, 9);
  Rng rng(9);
  for (Index d : {1, 4, 10}) {
    const FeatureSet fs = random_features(env.weights, d, rng);
    EXPECT_EQ(fs.provenance(), Provenance::kRandom);
    EXPECT_LE(fs.gram_deviation(), 1e-12);
  }
  EXPECT_EQ(baseline_kind_from_string("p_symmetrized"), BaselineKind::kPSymmetrized);
  EXPECT_THROW(baseline_kind_from_string("nope"), std::exception);
}

TEST(ConstantProjection, SpanContainsOrMisses) {
  const auto env = fixtures::stochastic(4, 2, 10);
  Rng rng(10);
  Matrix cols(8, 1);
  cols.col(0) = Vector::Ones(8);
  EXPECT_LE((constant_projection(FeatureSet(cols, env.weights, Provenance::kCustom)) - Vector::Ones(8))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
  EXPECT_LE(constant_projection(optimal_features(k, 3)).cwiseAbs().maxCoeff(), 1e-10);
  const FeatureSet fs = random_features(env.weights, 3, rng);
  EXPECT_LE((constant_projection(fs) - projector(fs).apply(Vector::Ones(8))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SubspaceDistance, ZeroForSameSpanAndPositiveOnCycle) {
  const auto env = fixtures::stochastic(4, 2, 11);
  Rng rng(11);
  const FeatureSet fs = random_features(env.weights, 3, rng);
  const Matrix rotated = fs.columns() * Eigen::HouseholderQR<Matrix>(Matrix::Random(3, 3)).householderQ();
  EXPECT_LE(subspace_distance(fs, FeatureSet(rotated, env.weights, Provenance::kCustom)), 1e-7);
  EXPECT_THROW(subspace_distance(fs, random_features(env.weights, 2, rng)), std::exception);

  const auto cycle = fixtures::env(lab::GeneratorKind::kDirectedCycle, 6, 2, 3);
  const AdvantageKernel k = build_kernel(cycle.mdp, cycle.pi0, cycle.weights, cycle.mdp.gamma());
  const FeatureSet lap = baseline_features(BaselineKind::kLaplacian, cycle.mdp, cycle.pi0, cycle.weights, 2, rng);
  EXPECT_GT(subspace_distance(optimal_features(k, 2), lap), 0.1);
}

TEST(ExpectedGain, TraceAndMomentFormsAgree) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto env = fixtures::stochastic(4, 3, seed);
    const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
    Rng rng(seed);
    const FeatureSet fs = random_features(env.weights, 4, rng);
    for (const RewardModel& m : {RewardModel::gaussian(), RewardModel::goal(), RewardModel::scattered(3.0, 1.0, 1.0),
                                 RewardModel::scattered(2.0, 0.0, 0.5)}) {
      const double a = expected_gain_numerator(fs, k, m);
      EXPECT_LE(rel(a, expected_gain_numerator_moments(fs, k, m)), 1e-9);
      EXPECT_LE(rel(expected_gain(fs, k, m, 8.0), a / (2.0 * 8.0 * 0.1)), 1e-14);
    }
  }
}

TEST(ExpectedGain, GaussianEqualsTrace) {
  const auto env = fixtures::stochastic(4, 2, 12);
  const AdvantageKernel k = build_kernel(env.mdp, env.pi0, env.weights, 0.9);
  const FeatureSet fs = optimal_features(k, 2);
  EXPECT_LE(rel(expected_gain_numerator(fs, k, RewardModel::gaussian()), trace_gain(fs, k)), 1e-12);
  EXPECT_NEAR(expected_baseline_return(RewardModel::gaussian(), env.weights, 0.9), 0.0, 1e-15);
  const RewardModel sc = RewardModel::scattered(3.0, 2.0, 1.0);
  EXPECT_NEAR(expected_baseline_return(sc, env.weights, 0.9),
              env.weights.rho().dot(first_moment(sc, env.weights)) / 0.1, 1e-12);
}
