#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "graphpoison/common.hpp"

namespace graphpoison {

inline nlohmann::json pairs_to_json(const std::vector<NodePair>& pairs) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto [u, v] : pairs) arr.push_back({u, v});
    return arr;
}

inline std::vector<NodePair> pairs_from_json(const nlohmann::json& arr) {
    std::vector<NodePair> out;
    for (const auto& e : arr) out.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return out;
}

}  // namespace graphpoison
