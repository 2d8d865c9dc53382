#include "rsf/simd/kernels.hpp"

namespace rsf::simd::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double weighted_sq_norm(const double* w, const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * a[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) axpy(x[j], a + j * rows, y, rows);
}

double quadratic_form(const double* m, std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += x[j] * dot(m + j * n, x, n);
  return s;
}

}  // namespace

const KernelTable kTable{dot, weighted_dot, weighted_sq_norm, axpy, gemv, quadratic_form};

}  // namespace rsf::simd::scalar
