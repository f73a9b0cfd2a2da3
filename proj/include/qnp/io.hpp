#ifndef QNP_IO_HPP
#define QNP_IO_HPP

// Plain-text artifacts: field CSV files, PGM heatmaps, metric tables and
// key=value configuration files.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/grid.hpp"

namespace qnp {

/// Shortest text that reads back to the same double (at most 17 significant digits).
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& text) {
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e) throw InvalidArgument("not a number: '" + text + "'");
  return x;
}

/// Header line "H,W,h", then H rows of W comma-separated values.
inline void write_field_csv(std::ostream& os, const Field2D& f) {
  os << f.rows() << ',' << f.cols() << ',' << format_double(f.h) << '\n';
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < f.cols(); ++j) {
      if (j) os << ',';
      os << format_double(f(i, j));
    }
    os << '\n';
  }
}

inline void write_field_csv(const std::string& path, const Field2D& f) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write " + path);
  write_field_csv(os, f);
  if (!os) throw InvalidArgument("write failed: " + path);
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline Field2D read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("field file is empty");
  const auto head = split(line, ',');
  if (head.size() != 3) throw InvalidArgument("field header must be H,W,h");
  const double hr = parse_double(head[0]);
  const double wr = parse_double(head[1]);
  const int H = static_cast<int>(hr);
  const int W = static_cast<int>(wr);
  if (H <= 0 || W <= 0 || H != hr || W != wr) throw InvalidArgument("field header has bad dimensions");
  Field2D f(H, W, parse_double(head[2]));
  for (int i = 0; i < H; ++i) {
    if (!std::getline(is, line)) throw InvalidArgument("field file has too few rows");
    const auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != W) {
      throw InvalidArgument("row " + std::to_string(i) + " has " + std::to_string(cells.size()) + " values, expected " +
                            std::to_string(W));
    }
    for (int j = 0; j < W; ++j) f(i, j) = parse_double(cells[static_cast<std::size_t>(j)]);
  }
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw InvalidArgument("trailing data after field rows");
  }
  return f;
}

inline Field2D read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read " + path);
  return read_field_csv(is);
}

/// 8-bit binary PGM, min-max normalized, top image row = top grid row. The
/// range goes to `path + ".range"` as "min,max".
inline void write_pgm(const std::string& path, const Field2D& f) {
  const auto& v = f.values.storage();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path);
  os << "P5\n" << f.cols() << ' ' << f.rows() << "\n255\n";
  for (int i = f.rows() - 1; i >= 0; --i) {
    for (int j = 0; j < f.cols(); ++j) {
      const double t = hi > lo ? (f(i, j) - lo) / (hi - lo) : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)))));
    }
  }
  std::ofstream side(path + ".range");
  side << format_double(lo) << ',' << format_double(hi) << '\n';
}

/// Rows with possibly different keys; the header is the sorted union.
inline void write_metrics_csv(std::ostream& os, const std::vector<std::map<std::string, double>>& rows) {
  std::set<std::string> keys;
  for (const auto& r : rows) {
    for (const auto& kv : r) keys.insert(kv.first);
  }
  bool first = true;
  for (const auto& k : keys) {
    os << (first ? "" : ",") << k;
    first = false;
  }
  os << '\n';
  for (const auto& r : rows) {
    first = true;
    for (const auto& k : keys) {
      os << (first ? "" : ",");
      first = false;
      if (const auto it = r.find(k); it != r.end()) os << format_double(it->second);
    }
    os << '\n';
  }
}

/// key=value lines; '#' starts a comment, blank lines are skipped.
inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

/// "HxW" -> (H, W).
inline std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw InvalidArgument("grid must look like HxW, got '" + text + "'");
  const double h = parse_double(text.substr(0, x));
  const double w = parse_double(text.substr(x + 1));
  if (h < 3 || w < 3 || h != static_cast<int>(h) || w != static_cast<int>(w)) {
    throw InvalidArgument("grid extents must be integers >= 3");
  }
  return {static_cast<int>(h), static_cast<int>(w)};
}

}  // namespace qnp

#endif  // QNP_IO_HPP
