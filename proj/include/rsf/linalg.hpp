#pragma once

#include "rsf/types.hpp"

namespace rsf::linalg {

/// Solves delta * X = rhs (dense LU). `delta` must be nonsingular.
Matrix solve(const Matrix& delta, const Matrix& rhs);

/// Solution of delta * x = rhs with rho^T x = 0, for a singular delta whose
/// kernel is the constants (gamma = 1 Laplacian of an ergodic chain) and a
/// rhs in its range. Solved through the bordered system
///   [delta 1; rho^T 0] [x; c] = [rhs; 0].
Matrix centered_solve(const Matrix& delta, const Vector& rho, const Matrix& rhs);

}  // namespace rsf::linalg
