#include "rsf/simd/kernels.hpp"

#include "rsf/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace rsf::simd {
namespace {

Backend initial_backend() {
  if (const char* env = std::getenv("RSF_SIMD")) {
    const std::string name(env);
    if (name == "scalar") return Backend::kScalar;
    if (name == "avx2" && backend_available(Backend::kAvx2)) return Backend::kAvx2;
    if (name == "neon" && backend_available(Backend::kNeon)) return Backend::kNeon;
  }
  return best_backend();
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

void require_same(std::size_t a, std::size_t b) {
  if (a != b) throw ShapeError("simd: length mismatch " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend b) {
  if (!backend_available(b)) throw DomainError("simd backend not available: " + std::string(backend_name(b)));
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::kAvx2:
      return avx2::kTable;
#endif
#if defined(__aarch64__)
    case Backend::kNeon:
      return neon::kTable;
#endif
    default:
      return scalar::kTable;
  }
}

Backend best_backend() {
  if (backend_available(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_available(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) throw DomainError("simd backend not available: " + std::string(backend_name(b)));
  current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& active() { return table(active_backend()); }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  require_same(w.size(), a.size());
  require_same(a.size(), b.size());
  return active().weighted_dot(w.data(), a.data(), b.data(), a.size());
}

double weighted_sq_norm(std::span<const double> w, std::span<const double> a) {
  require_same(w.size(), a.size());
  return active().weighted_sq_norm(w.data(), a.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
          std::span<double> y) {
  require_same(a.size(), rows * cols);
  require_same(x.size(), cols);
  require_same(y.size(), rows);
  active().gemv(a.data(), rows, cols, x.data(), y.data());
}

double quadratic_form(std::span<const double> m, std::size_t n, std::span<const double> x) {
  require_same(m.size(), n * n);
  require_same(x.size(), n);
  return active().quadratic_form(m.data(), n, x.data());
}

}  // namespace rsf::simd
