#include "rsf/mdp_io.hpp"

#include "rsf/errors.hpp"

#include <fstream>

namespace rsf::io {

nlohmann::json mdp_to_json(const Mdp& mdp) {
  nlohmann::json transitions = nlohmann::json::array();
  const Index A = mdp.num_actions();
  for (Index s = 0; s < mdp.num_states(); ++s) {
    for (Index a = 0; a < A; ++a) {
      for (Index s2 = 0; s2 < mdp.num_states(); ++s2) {
        const double p = mdp.transition()(sa_index(s, a, A), s2);
        if (p != 0.0) transitions.push_back({s, a, s2, p});
      }
    }
  }
  return {{"num_states", mdp.num_states()},
          {"num_actions", mdp.num_actions()},
          {"gamma", mdp.gamma()},
          {"transitions", std::move(transitions)}};
}

Mdp mdp_from_json(const nlohmann::json& j) {
  const Index S = j.at("num_states").get<Index>();
  const Index A = j.at("num_actions").get<Index>();
  const double gamma = j.at("gamma").get<double>();
  if (S <= 0 || A <= 0) throw DomainError("mdp json: num_states and num_actions must be positive");
  Matrix P = Matrix::Zero(S * A, S);
  for (const auto& t : j.at("transitions")) {
    if (!t.is_array() || t.size() != 4) throw DomainError("mdp json: transition entries are [s, a, s_next, prob]");
    const Index s = t[0].get<Index>();
    const Index a = t[1].get<Index>();
    const Index s2 = t[2].get<Index>();
    if (s < 0 || s >= S || a < 0 || a >= A || s2 < 0 || s2 >= S) throw DomainError("mdp json: index out of range");
    P(sa_index(s, a, A), s2) += t[3].get<double>();
  }
  return Mdp(S, A, std::move(P), gamma);
}

nlohmann::json policy_to_json(const Policy& policy) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index s = 0; s < policy.num_states(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (Index a = 0; a < policy.num_actions(); ++a) row.push_back(policy(s, a));
    rows.push_back(std::move(row));
  }
  return {{"probs", std::move(rows)}};
}

Policy policy_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("probs");
  if (!rows.is_array() || rows.empty()) throw DomainError("policy json: probs must be a non-empty array");
  const Index S = static_cast<Index>(rows.size());
  const Index A = static_cast<Index>(rows[0].size());
  Matrix probs(S, A);
  for (Index s = 0; s < S; ++s) {
    if (static_cast<Index>(rows[s].size()) != A) throw ShapeError("policy json: ragged probs");
    for (Index a = 0; a < A; ++a) probs(s, a) = rows[s][a].get<double>();
  }
  return Policy(std::move(probs));
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace rsf::io
