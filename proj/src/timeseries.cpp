#include "gfmatch/timeseries.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gfmatch/errors.hpp"

namespace gfm {

size_t TimeSeries::col_index(const std::string& name) const {
  for (size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] == name) return k;
  }
  throw ConfigError("no such column: " + name);
}

void write_csv(const TimeSeries& ts, std::ostream& os) {
  for (size_t c = 0; c < ts.cols.size(); ++c) {
    os << (c ? "," : "") << ts.cols[c];
  }
  os << '\n';
  char buf[32];
  const size_t nc = ts.cols.size();
  for (size_t r = 0; r < ts.nrows(); ++r) {
    for (size_t c = 0; c < nc; ++c) {
      if (c) os << ',';
      const double v = ts.at(r, c);
      if (std::isnan(v)) continue;  // blank cell
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << buf;
    }
    os << '\n';
  }
}

void write_csv_file(const TimeSeries& ts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  write_csv(ts, out);
}

std::string csv_string(const TimeSeries& ts) {
  std::ostringstream ss;
  write_csv(ts, ss);
  return ss.str();
}

WindowStats window_stats(const TimeSeries& ts, const std::string& col,
                         double t0, double t1) {
  const size_t ci = ts.col_index(col);
  WindowStats w;
  double acc = 0.0;
  for (size_t r = 0; r < ts.nrows(); ++r) {
    const double t = ts.at(r, 0);
    if (t < t0 || t > t1) continue;
    const double v = ts.at(r, ci);
    if (w.n == 0) {
      w.vmin = w.vmax = v;
    } else {
      w.vmin = std::min(w.vmin, v);
      w.vmax = std::max(w.vmax, v);
    }
    acc += v;
    ++w.n;
  }
  if (w.n == 0) throw ConfigError("window [" + std::to_string(t0) + ", " +
                                  std::to_string(t1) + "] holds no samples");
  w.mean = acc / static_cast<double>(w.n);
  return w;
}

std::vector<double> window_values(const TimeSeries& ts, const std::string& col,
                                  double t0, double t1) {
  const size_t ci = ts.col_index(col);
  std::vector<double> out;
  for (size_t r = 0; r < ts.nrows(); ++r) {
    const double t = ts.at(r, 0);
    if (t0 <= t && t <= t1) out.push_back(ts.at(r, ci));
  }
  return out;
}

}  // namespace gfm
