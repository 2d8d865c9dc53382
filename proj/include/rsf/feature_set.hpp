#pragma once

#include "rsf/mdp.hpp"
#include "rsf/types.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace rsf {

enum class Provenance { kOptimal, kLaplacian, kPSymmetrized, kRandom, kClosedForm, kCustom };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view name);

/// d feature columns over state-actions, orthonormal in L2(rho):
/// columns^T diag(rho) columns = Id. Construction checks this within 1e-10.
class FeatureSet {
 public:
  static constexpr double kOrthonormalTol = 1e-10;

  FeatureSet(Matrix columns, StateActionWeights weights, Provenance provenance);

  Index dim() const { return columns_.cols(); }
  Index size() const { return columns_.rows(); }
  const Matrix& columns() const { return columns_; }
  const StateActionWeights& weights() const { return weights_; }
  Provenance provenance() const { return provenance_; }

  /// Largest entry of |columns^T rho_hat columns - Id|.
  double gram_deviation() const;

 private:
  Matrix columns_;
  StateActionWeights weights_;
  Provenance provenance_;
};

/// {"d": d, "provenance": tag, "columns": [[...], ...]}, one inner array per column.
nlohmann::json feature_set_to_json(const FeatureSet& fs);
/// Columns are re-validated against `weights`.
FeatureSet feature_set_from_json(const nlohmann::json& j, const StateActionWeights& weights);

}  // namespace rsf
