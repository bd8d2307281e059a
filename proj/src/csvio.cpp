#include "nsquant/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "nsquant/errors.hpp"

namespace nsquant {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

UnitTimeSeries DatasetFile::to_series() const {
  return UnitTimeSeries::from(values);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

}  // namespace

DatasetFile parse_dataset_csv(std::istream& in) {
  DatasetFile data;
  std::string line;
  std::size_t row = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::string label, value_text;
    const std::size_t comma = stripped.rfind(',');
    if (comma == std::string::npos) {
      value_text = stripped;
    } else {
      label = trim(stripped.substr(0, comma));
      value_text = stripped.substr(comma + 1);
    }
    double v = 0;
    if (!parse_number(value_text, v)) {
      // A single non-numeric leading row doubles as a header.
      if (!saw_data && row == 1) continue;
      throw ParseError("row " + std::to_string(row) + ": cannot parse '" +
                       trim(value_text) + "' as a number");
    }
    saw_data = true;
    data.labels.push_back(label);
    data.values.push_back(v);
  }
  if (!saw_data) throw ParseError("no data rows found");
  return data;
}

DatasetFile parse_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_dataset_csv(in);
}

std::string write_dataset_csv(const DatasetFile& data) {
  std::ostringstream os;
  bool any_label = false;
  for (const auto& l : data.labels)
    if (!l.empty()) any_label = true;
  for (std::size_t i = 0; i < data.values.size(); ++i) {
    if (any_label) os << (i < data.labels.size() ? data.labels[i] : "") << ',';
    os << format_double(data.values[i]) << '\n';
  }
  return os.str();
}

DatasetFile deseasonalize(const DatasetFile& data, std::size_t period) {
  const std::size_t n = data.values.size();
  if (period < 2)
    throw ValidationError("deseasonalize: period must be >= 2");
  if (period > n / 2)
    throw ValidationError("deseasonalize: period " + std::to_string(period) +
                          " exceeds half the series length " +
                          std::to_string(n));
  std::vector<double> mean(period, 0.0);
  std::vector<std::size_t> count(period, 0);
  for (std::size_t i = 0; i < n; ++i) {
    mean[i % period] += data.values[i];
    ++count[i % period];
  }
  for (std::size_t c = 0; c < period; ++c) mean[c] /= count[c];
  DatasetFile out = data;
  for (std::size_t i = 0; i < n; ++i) out.values[i] -= mean[i % period];
  return out;
}

}  // namespace nsquant
