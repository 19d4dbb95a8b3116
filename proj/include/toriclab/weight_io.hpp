#pragma once

// JSON form of a ToricWeight:
//   {"degree_m", "grid": {"t_min", "t_max", "count"}, "values": [...],
//    "left_slope", "right_slope", "singular_epsilon", "singular_floor"?}
// Reals are written as hex-float strings ("0x1.8p+1") so they round-trip
// exactly; plain JSON numbers are accepted on input.

#include <string>

#include "json.hpp"
#include "toriclab/convex.hpp"

namespace toriclab {

std::string hex_double(double x);
/// Accepts a hex-float string, a decimal string, or a JSON number.
double parse_double(const nlohmann::json& j);

nlohmann::json weight_to_json(const ToricWeight& u);
ToricWeight weight_from_json(const nlohmann::json& j);

}  // namespace toriclab
