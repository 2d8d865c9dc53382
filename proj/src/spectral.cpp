#include "rsf/spectral.hpp"

#include "rsf/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numeric>

namespace rsf {

namespace {

Matrix similarity(const Matrix& op, const Vector& rho) {
  if (op.rows() != rho.size() || op.cols() != rho.size()) throw ShapeError("spectrum: operator size mismatch");
  const Vector sq = rho.cwiseSqrt();
  const Vector inv_sq = sq.cwiseInverse();
  Matrix s = sq.asDiagonal() * op * inv_sq.asDiagonal();
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff() / scale;
  if (asym > 1e-8) throw DomainError("operator is not self-adjoint in L2(rho) (asymmetry " + std::to_string(asym) + ")");
  return 0.5 * (s + s.transpose());
}

SpectralResult sorted(const Eigen::SelfAdjointEigenSolver<Matrix>& es, const Matrix& basis, const Vector& inv_sq,
                      std::string source) {
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const Index n = es.eigenvalues().size();
  SpectralResult out;
  out.source = std::move(source);
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(basis.rows(), n);
  // SelfAdjointEigenSolver returns ascending order.
  for (Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = inv_sq.asDiagonal() * (basis * es.eigenvectors().col(n - 1 - i));
  }
  return out;
}

}  // namespace

SpectralResult self_adjoint_spectrum(const Matrix& op, const StateActionWeights& w, std::string source) {
  const Matrix s = similarity(op, w.rho());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  return sorted(es, Matrix::Identity(s.rows(), s.cols()), w.rho().cwiseSqrt().cwiseInverse(), std::move(source));
}

SpectralResult centered_spectrum(const Matrix& op, const StateActionWeights& w, std::string source,
                                 double constant_value) {
  const Matrix s = similarity(op, w.rho());
  const Index n = s.rows();
  const Vector sq = w.rho().cwiseSqrt();
  // In transformed coordinates the constants become sqrt(rho), a unit vector.
  Eigen::HouseholderQR<Matrix> qr(sq);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix complement = q.rightCols(n - 1);
  const Matrix restricted = complement.transpose() * s * complement;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (restricted + restricted.transpose()));
  SpectralResult inner = sorted(es, complement, sq.cwiseInverse(), std::move(source));
  SpectralResult out;
  out.source = std::move(inner.source);
  out.eigenvalues.resize(n);
  out.eigenvalues << inner.eigenvalues, constant_value;
  out.eigenvectors.resize(n, n);
  out.eigenvectors << inner.eigenvectors, Vector::Ones(n);
  return out;
}

Index cluster_extent(const Vector& descending, Index d, double gap) {
  const Index n = descending.size();
  if (d < 0 || d > n) throw DomainError("cluster_extent: d out of range");
  if (d == 0) return 0;
  Index k = d;
  while (k < n && std::abs(descending(k - 1) - descending(k)) < gap) ++k;
  return k;
}

bool separated_at(const Vector& descending, Index d, double gap) {
  if (d <= 0 || d >= descending.size()) return true;
  return descending(d - 1) - descending(d) > gap;
}

double largest_principal_angle(const Matrix& a, const Matrix& b, const StateActionWeights& w) {
  if (a.rows() != w.size() || b.rows() != w.size()) throw ShapeError("principal angle: row count mismatch");
  const Matrix& small = a.cols() <= b.cols() ? a : b;
  const Matrix& large = a.cols() <= b.cols() ? b : a;
  if (small.cols() == 0) return 0.0;
  if (large.cols() == 0) throw ShapeError("principal angle: empty subspace");
  const auto rho = w.rho().asDiagonal();
  const Matrix cross = large.transpose() * rho * small;
  const Matrix residual = small - large * cross;
  // Work in rho^{1/2} coordinates so the Euclidean SVD sees the L2(rho) geometry.
  const Matrix residual_t = w.rho().cwiseSqrt().asDiagonal() * residual;
  Eigen::JacobiSVD<Matrix> sv_cross(cross);
  Eigen::JacobiSVD<Matrix> sv_res(residual_t);
  const double cos_min = sv_cross.singularValues().minCoeff();
  const double sin_max = sv_res.singularValues().maxCoeff();
  return std::atan2(sin_max, std::max(cos_min, 0.0));
}

}  // namespace rsf
