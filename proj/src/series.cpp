#include "nsquant/series.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "nsquant/errors.hpp"

namespace nsquant {

UnitTimeSeries UnitTimeSeries::from(std::vector<double> values) {
  if (values.empty()) throw ValidationError("series must be nonempty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw ValidationError("series value at position " + std::to_string(i + 1) +
                            " is not finite");
  }
  UnitTimeSeries s;
  s.values = std::move(values);
  return s;
}

}  // namespace nsquant
