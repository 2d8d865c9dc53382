#pragma once

// Eigen-decompositions of operators that are self-adjoint in L2(rho), solved
// through the symmetric similarity transform rho_hat^{1/2} Op rho_hat^{-1/2},
// and principal angles between rho-orthonormal subspaces.

#include "rsf/mdp.hpp"
#include "rsf/types.hpp"

#include <string>

namespace rsf {

struct SpectralResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // L2(rho)-orthonormal columns
  std::string source;
};

inline constexpr double kTieGap = 1e-6;

/// Full spectrum of `op`, which must be self-adjoint in L2(rho) (relative
/// asymmetry of the transformed matrix above 1e-8 is rejected).
SpectralResult self_adjoint_spectrum(const Matrix& op, const StateActionWeights& w, std::string source);

/// Spectrum of `op` restricted to L2_0(rho), which `op` must leave invariant.
/// The constant function is appended last with eigenvalue `constant_value`.
SpectralResult centered_spectrum(const Matrix& op, const StateActionWeights& w, std::string source,
                                 double constant_value);

/// Number of leading eigenvectors to keep so that the first `d` are included
/// together with every eigenvalue tied (gap below `gap`) to the d-th one.
Index cluster_extent(const Vector& descending, Index d, double gap = kTieGap);

/// True when lambda_d - lambda_{d+1} exceeds `gap` (or d is 0 or the full size).
bool separated_at(const Vector& descending, Index d, double gap = kTieGap);

/// Largest principal angle between span(a) and span(b), columns
/// L2(rho)-orthonormal. When the dimensions differ it measures how far the
/// smaller span is from being contained in the larger one.
double largest_principal_angle(const Matrix& a, const Matrix& b, const StateActionWeights& w);

}  // namespace rsf
