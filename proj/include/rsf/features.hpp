#pragma once

// Candidate feature families and the quantities used to rank them: the
// optimal features (top eigenvectors of rho_hat^{-1} K), Laplacian and
// P + P* eigenfunctions, random orthonormal features, trace gains, the
// projection of the constant reward, and subspace distances.

#include "rsf/advantage_kernel.hpp"
#include "rsf/feature_set.hpp"
#include "rsf/rewards.hpp"
#include "rsf/spectral.hpp"

namespace rsf {

/// Spectrum of rho_hat^{-1} K. Solved on L2_0(rho) with the constant
/// appended last (eigenvalue 0), so that constants are never picked ahead
/// of a centered direction of the zero eigenspace.
SpectralResult kernel_spectrum(const AdvantageKernel& kernel);

/// Top-d eigenvectors of rho_hat^{-1} K, 1 <= d <= S*A.
FeatureSet optimal_features(const AdvantageKernel& kernel, Index d);

enum class BaselineKind { kLaplacian, kPSymmetrized, kRandom };
BaselineKind baseline_kind_from_string(std::string_view name);

/// Spectrum of Delta + Delta* for Delta = Id - P_pi0 (descending).
SpectralResult laplacian_spectrum(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w);
/// Spectrum of P_pi0 + P_pi0* (descending).
SpectralResult p_symmetrized_spectrum(const Mdp& mdp, const Policy& pi0, const StateActionWeights& w);

/// laplacian_eigs: d smallest eigenfunctions of Delta + Delta* (gamma = 1);
/// p_symmetrized: d largest of P + P*; random: orthonormalized N(0,1) columns.
FeatureSet baseline_features(BaselineKind kind, const Mdp& mdp, const Policy& pi0, const StateActionWeights& w,
                             Index d, Rng& rng);

FeatureSet random_features(const StateActionWeights& w, Index d, Rng& rng);

/// Leading d eigenvectors of an L2(rho) self-adjoint operator.
FeatureSet leading_eigenfeatures(const SpectralResult& spectrum, const StateActionWeights& w, Index d,
                                 Provenance provenance);

/// Tr(phi^T K phi). Rejects feature sets whose Gram deviation exceeds 1e-8.
double trace_gain(const FeatureSet& features, const AdvantageKernel& kernel);

/// Pi 1 = phi (phi^T rho).
StateActionFn constant_projection(const FeatureSet& features);

/// Largest principal angle between the spans (radians). Equal d required.
double subspace_distance(const FeatureSet& a, const FeatureSet& b);

/// E_r[||Q||_A^2 - ||Q_hat - Q||_A^2] under `model` for RSF with `features`:
/// c Tr(phi^T K phi) - (kappa mu)^2 phi_cst^T K phi_cst, c = kappa (mu^2 + sigma^2)
/// for scattered rewards and c = 1 otherwise.
double expected_gain_numerator(const FeatureSet& features, const AdvantageKernel& kernel, const RewardModel& model);

/// The same expectation through second moments:
/// Tr(K M) - Tr(K (Id - Pi) M (Id - Pi)^T) with M = E[r r^T].
double expected_gain_numerator_moments(const FeatureSet& features, const AdvantageKernel& kernel,
                                       const RewardModel& model);

/// First-order expected gain of RSF over pi0: numerator / (2 T (1 - gamma)).
double expected_gain(const FeatureSet& features, const AdvantageKernel& kernel, const RewardModel& model,
                     double temperature);

/// E_r[G_r^pi0] = rho^T E[r] / (1 - gamma).
double expected_baseline_return(const RewardModel& model, const StateActionWeights& w, double gamma);

}  // namespace rsf
