#pragma once

#include <cstddef>

#include "rationlog/jsonl.hpp"

namespace rationlog {

// Whitespace-token length statistics of the distilled analyses; the mean is
// the brevity reward's target length.
struct LengthStats {
  double target_length = 0.0;
  double std_dev = 0.0;
  std::size_t n = 0;

  void validate() const;
};

Json length_stats_to_json(const LengthStats& stats);
LengthStats length_stats_from_json(const Json& obj);

}  // namespace rationlog
