#pragma once

// Data-parallel inner loops shared by the geometry, kernel and Monte-Carlo
// code. Every kernel has a scalar reference version; vectorized variants are
// compiled per ISA and picked at runtime (RSF_SIMD=scalar|avx2|neon overrides).

#include <cstddef>
#include <span>
#include <string_view>

namespace rsf::simd {

enum class Backend { kScalar, kAvx2, kNeon };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  double (*weighted_sq_norm)(const double* w, const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x with A column-major rows x cols.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // x^T M x with M column-major n x n.
  double (*quadratic_form)(const double* m, std::size_t n, const double* x);
};

namespace scalar {
extern const KernelTable kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable kTable;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const KernelTable kTable;
}
#endif

bool backend_available(Backend b);
const KernelTable& table(Backend b);
Backend best_backend();
Backend active_backend();
void set_backend(Backend b);
std::string_view backend_name(Backend b);

const KernelTable& active();

double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
double weighted_sq_norm(std::span<const double> w, std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y);
double quadratic_form(std::span<const double> m, std::size_t n, std::span<const double> x);

}  // namespace rsf::simd
