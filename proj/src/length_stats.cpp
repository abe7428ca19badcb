#include "rationlog/length_stats.hpp"

#include <cmath>

#include "rationlog/error.hpp"

namespace rationlog {

void LengthStats::validate() const {
  if (n < 1 || !(target_length > 0.0) || !std::isfinite(target_length) || !(std_dev >= 0.0))
    throw Error(ErrorKind::kInvalidConfig, "length stats need n >= 1, target_length > 0, std_dev >= 0");
}

Json length_stats_to_json(const LengthStats& s) {
  return Json{{"target_length", s.target_length}, {"std_dev", s.std_dev}, {"n", s.n}};
}

LengthStats length_stats_from_json(const Json& obj) {
  LengthStats s;
  s.target_length = json_number(obj, "target_length");
  s.std_dev = json_number(obj, "std_dev");
  const long long n = json_int(obj, "n");
  if (n < 0) throw Error(ErrorKind::kSchema, "negative n");
  s.n = static_cast<std::size_t>(n);
  s.validate();
  return s;
}

}  // namespace rationlog
