#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace rsf {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Rewards, Q-functions and features are column vectors over state-actions,
// laid out as index = s * num_actions + a.
using StateActionFn = Eigen::VectorXd;

inline Index sa_index(Index s, Index a, Index num_actions) { return s * num_actions + a; }

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline std::span<double> as_span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace rsf
