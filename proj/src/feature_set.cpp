#include "rsf/feature_set.hpp"

#include "rsf/errors.hpp"

#include <array>
#include <utility>

namespace rsf {
namespace {

constexpr std::array<std::pair<Provenance, std::string_view>, 6> kNames{{
    {Provenance::kOptimal, "optimal"},
    {Provenance::kLaplacian, "laplacian_eigs"},
    {Provenance::kPSymmetrized, "p_symmetrized"},
    {Provenance::kRandom, "random"},
    {Provenance::kClosedForm, "closed_form"},
    {Provenance::kCustom, "custom"},
}};

double gram_deviation_of(const Matrix& columns, const Vector& rho) {
  if (columns.cols() == 0) return 0.0;
  const Matrix gram = columns.transpose() * rho.asDiagonal() * columns;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

std::string_view to_string(Provenance p) {
  for (const auto& [value, name] : kNames)
    if (value == p) return name;
  return "custom";
}

Provenance provenance_from_string(std::string_view name) {
  for (const auto& [value, n] : kNames)
    if (n == name) return value;
  throw DomainError("unknown feature provenance: " + std::string(name));
}

FeatureSet::FeatureSet(Matrix columns, StateActionWeights weights, Provenance provenance)
    : columns_(std::move(columns)), weights_(std::move(weights)), provenance_(provenance) {
  if (columns_.rows() != weights_.size()) throw ShapeError("FeatureSet: columns must have S*A rows");
  if (!columns_.allFinite()) throw DomainError("FeatureSet: non-finite feature value");
  const double dev = gram_deviation_of(columns_, weights_.rho());
  if (dev > kOrthonormalTol) {
    throw DomainError("FeatureSet: columns are not L2(rho)-orthonormal (deviation " + std::to_string(dev) + ")");
  }
}

double FeatureSet::gram_deviation() const { return gram_deviation_of(columns_, weights_.rho()); }

nlohmann::json feature_set_to_json(const FeatureSet& fs) {
  nlohmann::json cols = nlohmann::json::array();
  for (Index j = 0; j < fs.dim(); ++j) {
    cols.push_back(std::vector<double>(fs.columns().col(j).data(), fs.columns().col(j).data() + fs.size()));
  }
  return {{"d", fs.dim()}, {"provenance", std::string(to_string(fs.provenance()))}, {"columns", std::move(cols)}};
}

FeatureSet feature_set_from_json(const nlohmann::json& j, const StateActionWeights& weights) {
  const Index d = j.at("d").get<Index>();
  const auto& cols = j.at("columns");
  if (static_cast<Index>(cols.size()) != d) throw ShapeError("feature json: d does not match the column count");
  Matrix m(weights.size(), d);
  for (Index c = 0; c < d; ++c) {
    const auto values = cols[c].get<std::vector<double>>();
    if (static_cast<Index>(values.size()) != weights.size()) throw ShapeError("feature json: column length must be S*A");
    for (Index i = 0; i < weights.size(); ++i) m(i, c) = values[i];
  }
  return FeatureSet(std::move(m), weights, provenance_from_string(j.at("provenance").get<std::string>()));
}

}  // namespace rsf
