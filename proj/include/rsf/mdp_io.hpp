#pragma once

// JSON encodings:
//   MDP:    {"num_states": n, "num_actions": m, "gamma": g,
//            "transitions": [[s, a, s_next, prob], ...]}   (unlisted triples are 0)
//   Policy: {"probs": [[...], ...]}                        (row-major by state)

#include "rsf/mdp.hpp"

#include <json.hpp>

#include <filesystem>

namespace rsf::io {

nlohmann::json mdp_to_json(const Mdp& mdp);
Mdp mdp_from_json(const nlohmann::json& j);

nlohmann::json policy_to_json(const Policy& policy);
Policy policy_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace rsf::io
