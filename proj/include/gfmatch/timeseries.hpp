#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace gfm {

// Dense row-major table of doubles with named columns. NaN cells are
// written as empty CSV fields (used where a column has no defined value,
// e.g. storage energy without a reference equilibrium).
struct TimeSeries {
  std::vector<std::string> cols;
  std::vector<double> data;

  size_t ncols() const { return cols.size(); }
  size_t nrows() const { return cols.empty() ? 0 : data.size() / cols.size(); }
  double at(size_t row, size_t col) const { return data[row * cols.size() + col]; }
  void push_row(const double* row) { data.insert(data.end(), row, row + cols.size()); }
  size_t col_index(const std::string& name) const;  // throws ConfigError if absent
};

// Full-precision CSV (%.17g round-trips doubles exactly).
void write_csv(const TimeSeries& ts, std::ostream& os);
void write_csv_file(const TimeSeries& ts, const std::string& path);
std::string csv_string(const TimeSeries& ts);

// Statistics of one column over rows with t0 <= t <= t1 (column 0 is time).
struct WindowStats {
  long n{};
  double mean{};
  double vmin{};
  double vmax{};
};

WindowStats window_stats(const TimeSeries& ts, const std::string& col,
                         double t0, double t1);

std::vector<double> window_values(const TimeSeries& ts, const std::string& col,
                                  double t0, double t1);

}  // namespace gfm
