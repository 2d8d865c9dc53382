#include "oracles.hpp"
#include "rsf/errors.hpp"
#include "rsf/spectral.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace rsf;

namespace {

/// rho_hat^{-1} S with S symmetric is self-adjoint in L2(rho).
Matrix random_self_adjoint(const StateActionWeights& w, Rng& rng) {
  const Index n = w.size();
  Matrix s(n, n);
  for (Index j = 0; j < n; ++j) s.col(j) = fixtures::random_vector(n, rng);
  s = (s + s.transpose()).eval();
  return w.rho().cwiseInverse().asDiagonal() * s;
}

}  // namespace

TEST(Spectrum, DescendingOrthonormalAndExact) {
  const auto env = fixtures::stochastic(4, 2, 1);
  Rng rng(1);
  const Matrix op = random_self_adjoint(env.weights, rng);
  const SpectralResult sp = self_adjoint_spectrum(op, env.weights, "test");
  EXPECT_EQ(sp.source, "test");
  for (Index i = 1; i < sp.eigenvalues.size(); ++i) EXPECT_GE(sp.eigenvalues(i - 1), sp.eigenvalues(i));
  const Matrix gram = sp.eigenvectors.transpose() * env.weights.rho().asDiagonal() * sp.eigenvectors;
  EXPECT_LE((gram - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-10);
  const Matrix residual = op * sp.eigenvectors - sp.eigenvectors * sp.eigenvalues.asDiagonal();
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, op.cwiseAbs().maxCoeff()));
  EXPECT_LE((sp.eigenvalues - oracle::general_eigenvalues_desc(op)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Spectrum, RejectsNonSelfAdjoint) {
  const auto env = fixtures::stochastic(3, 2, 2);
  Rng rng(2);
  Matrix op(6, 6);
  for (Index j = 0; j < 6; ++j) op.col(j) = fixtures::random_vector(6, rng);
  EXPECT_THROW(self_adjoint_spectrum(op, env.weights, "x"), DomainError);
}

TEST(Spectrum, CenteredAppendsConstantLast) {
  const auto env = fixtures::stochastic(3, 2, 3);
  Rng rng(3);
  // C M C with C the rho-centering projector leaves L2_0 invariant and kills constants.
  const Index n = 6;
  const Matrix c = Matrix::Identity(n, n) - Vector::Ones(n) * env.weights.rho().transpose();
  const Matrix op = c * random_self_adjoint(env.weights, rng) * c;
  const SpectralResult sp = centered_spectrum(op, env.weights, "c", -1e9);
  ASSERT_EQ(sp.eigenvalues.size(), n);
  EXPECT_EQ(sp.eigenvalues(n - 1), -1e9);
  EXPECT_LE((sp.eigenvectors.col(n - 1) - Vector::Ones(n)).cwiseAbs().maxCoeff(), 1e-12);
  for (Index i = 0; i + 1 < n; ++i) {
    EXPECT_LE(std::abs(env.weights.rho().dot(sp.eigenvectors.col(i))), 1e-10);
    EXPECT_LE((op * sp.eigenvectors.col(i) - sp.eigenvalues(i) * sp.eigenvectors.col(i)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Spectrum, ClusterExtentAndSeparation) {
  Vector ev(6);
  ev << 5.0, 3.0, 3.0 - 1e-9, 3.0 - 2e-9, 1.0, 0.0;
  EXPECT_EQ(cluster_extent(ev, 1), 1);
  EXPECT_EQ(cluster_extent(ev, 2), 4);
  EXPECT_EQ(cluster_extent(ev, 3), 4);
  EXPECT_EQ(cluster_extent(ev, 5), 5);
  EXPECT_TRUE(separated_at(ev, 1));
  EXPECT_FALSE(separated_at(ev, 2));
  EXPECT_TRUE(separated_at(ev, 4));
  EXPECT_TRUE(separated_at(ev, 0));
  EXPECT_TRUE(separated_at(ev, 6));
}

TEST(PrincipalAngle, SameOrthogonalAndOracle) {
  const auto env = fixtures::stochastic(4, 2, 4);
  Rng rng(4);
  const SpectralResult sp = self_adjoint_spectrum(random_self_adjoint(env.weights, rng), env.weights, "a");
  const Matrix& v = sp.eigenvectors;
  const Matrix first = v.leftCols(3);
  Matrix mixed = first * Eigen::HouseholderQR<Matrix>(Matrix::Random(3, 3)).householderQ();
  EXPECT_LE(largest_principal_angle(first, mixed, env.weights), 1e-7);
  EXPECT_NEAR(largest_principal_angle(first, v.rightCols(3), env.weights), std::numbers::pi / 2, 1e-7);

  Matrix tilted = first;
  tilted.col(2) = std::cos(0.3) * v.col(2) + std::sin(0.3) * v.col(5);
  EXPECT_NEAR(largest_principal_angle(first, tilted, env.weights), 0.3, 1e-9);
  EXPECT_NEAR(largest_principal_angle(first, tilted, env.weights),
              oracle::principal_angle(first, tilted, env.weights.rho()), 1e-9);
}
