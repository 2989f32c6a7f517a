#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/types.hpp"

namespace gsr {

inline nlohmann::json vec_to_json(const Vec& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

inline Vec vec_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace gsr
