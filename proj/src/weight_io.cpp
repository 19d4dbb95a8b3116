#include "toriclab/weight_io.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace toriclab {

std::string hex_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  char* p = buf;
  if (std::signbit(x)) {
    *p++ = '-';
    x = -x;
  }
  *p++ = '0';
  *p++ = 'x';
  auto res = std::to_chars(p, buf + sizeof buf, x, std::chars_format::hex);
  return std::string(buf, res.ptr);
}

double parse_double(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw DomainError("expected a number or numeric string");
  std::string_view s = j.get_ref<const std::string&>();
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  double v = 0.0;
  std::from_chars_result r{};
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    r = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
  } else {
    r = std::from_chars(s.data(), s.data() + s.size(), v);
  }
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DomainError("cannot parse number: " + j.get<std::string>());
  return neg ? -v : v;
}

nlohmann::json weight_to_json(const ToricWeight& u) {
  nlohmann::json j;
  j["degree_m"] = u.degree();
  j["grid"] = {{"t_min", hex_double(u.grid().t_min)},
               {"t_max", hex_double(u.grid().t_max)},
               {"count", u.grid().count}};
  auto& vals = j["values"] = nlohmann::json::array();
  for (double v : u.values()) vals.push_back(hex_double(v));
  j["left_slope"] = hex_double(u.left_slope());
  j["right_slope"] = hex_double(u.right_slope());
  const auto& tail = u.singular_tail();
  j["singular_epsilon"] = hex_double(tail ? tail->epsilon : 0.0);
  if (tail && tail->floor)
    j["singular_floor"] = {{"value", hex_double(tail->floor->value)},
                           {"slope", hex_double(tail->floor->slope)}};
  return j;
}

ToricWeight weight_from_json(const nlohmann::json& j) {
  try {
    const int m = j.at("degree_m").get<int>();
    const auto& g = j.at("grid");
    UniformGrid grid{parse_double(g.at("t_min")), parse_double(g.at("t_max")),
                     g.at("count").get<std::size_t>()};
    std::vector<double> values;
    for (const auto& v : j.at("values")) values.push_back(parse_double(v));
    std::optional<SingularTail> tail;
    const double eps = j.contains("singular_epsilon") ? parse_double(j["singular_epsilon"]) : 0.0;
    if (eps != 0.0 || j.contains("singular_floor")) {
      tail = SingularTail{eps, std::nullopt};
      if (j.contains("singular_floor"))
        tail->floor = TailFloor{parse_double(j["singular_floor"].at("value")),
                                parse_double(j["singular_floor"].at("slope"))};
    }
    return ToricWeight(m, grid, std::move(values), parse_double(j.at("left_slope")),
                       parse_double(j.at("right_slope")), tail);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("weight json: ") + e.what());
  }
}

}  // namespace toriclab
