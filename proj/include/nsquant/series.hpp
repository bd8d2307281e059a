#pragma once

#include <cstddef>
#include <vector>

namespace nsquant {

// Observations X_1..X_n attached to rescaled times i/n in (0, 1].
struct UnitTimeSeries {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  // 0-based position i holds observation i+1 at time (i+1)/n.
  double time(std::size_t i) const {
    return static_cast<double>(i + 1) / static_cast<double>(values.size());
  }

  // Validates: nonempty, all values finite.  Throws ValidationError.
  static UnitTimeSeries from(std::vector<double> values);
};

}  // namespace nsquant
