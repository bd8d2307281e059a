#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsquant/series.hpp"

namespace nsquant {

// %.17g rendering: shortest text that round-trips a double exactly.
std::string format_double(double x);

struct DatasetFile {
  std::vector<std::string> labels;  // empty strings when input had no labels
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  UnitTimeSeries to_series() const;
};

// Rows are `value` or `label,value`; an optional header row is skipped.
// Throws ParseError with the offending row number.
DatasetFile parse_dataset_csv(std::istream& in);
DatasetFile parse_dataset_file(const std::string& path);

std::string write_dataset_csv(const DatasetFile& data);

// Subtracts the mean of each residue class (row index mod period).
// Throws ValidationError unless 2 <= period <= n/2.
DatasetFile deseasonalize(const DatasetFile& data, std::size_t period);

}  // namespace nsquant
