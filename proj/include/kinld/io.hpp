#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kinld/grid.hpp"

namespace kinld::io {

/// 17 significant digits: doubles round-trip exactly.
[[nodiscard]] inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[nodiscard]] inline std::string format_value(ExtendedValue e) {
  return e.is_finite() ? format_double(e.value()) : std::string("inf");
}

[[nodiscard]] inline std::uint64_t fnv1a(const std::string& s) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// CSV forms of the min-plus fields: one-line header, "inf" for the
// infinite value.

[[nodiscard]] inline std::string to_csv(const MinPlusField1& f) {
  std::ostringstream os;
  os << "x,value\n";
  for (int i = 0; i < f.grid.size(); ++i)
    os << format_double(f.grid.node(i)) << ',' << format_value(f(i)) << '\n';
  return os.str();
}

[[nodiscard]] inline std::string to_csv(const MinPlusField2& f) {
  std::ostringstream os;
  os << "x,v,value\n";
  for (int j = 0; j < f.vgrid.size(); ++j)
    for (int i = 0; i < f.xgrid.size(); ++i)
      os << format_double(f.xgrid.node(i)) << ',' << format_double(f.vgrid.node(j)) << ','
         << format_value(f(i, j)) << '\n';
  return os.str();
}

namespace detail {

[[nodiscard]] inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

[[nodiscard]] inline ExtendedValue parse_value(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "Inf") return ExtendedValue::infinity();
  return ExtendedValue::finite(std::stod(s));
}

}  // namespace detail

/// Reads an (x, v, value) CSV produced by to_csv back into a field. The node
/// set must form a full rectangular uniform grid.
[[nodiscard]] inline MinPlusField2 read_field2_csv(std::istream& in) {
  auto rows = detail::parse_csv(in);
  if (rows.size() < 2 || rows[0].size() != 3)
    throw std::runtime_error("expected header x,v,value");
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (rows[r].size() != 3) throw std::runtime_error("malformed CSV row");
  // recover grid extents from the sorted unique coordinates
  std::vector<double> ux, uv;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double x = std::stod(rows[r][0]);
    const double v = std::stod(rows[r][1]);
    bool kx = false, kv = false;
    for (double z : ux) kx = kx || z == x;
    for (double z : uv) kv = kv || z == v;
    if (!kx) ux.push_back(x);
    if (!kv) uv.push_back(v);
  }
  std::sort(ux.begin(), ux.end());
  std::sort(uv.begin(), uv.end());
  if (ux.size() < 2 || uv.size() < 2) throw std::runtime_error("degenerate grid in CSV");
  MinPlusField2 f(SpatialGrid(ux.front(), ux.back(), static_cast<int>(ux.size())),
                  VelocityGrid(uv.front(), uv.back(), static_cast<int>(uv.size())));
  if (rows.size() - 1 != ux.size() * uv.size())
    throw std::runtime_error("CSV rows do not fill the rectangular grid");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double x = std::stod(rows[r][0]);
    const double v = std::stod(rows[r][1]);
    f.at(f.xgrid.nearest(x), f.vgrid.nearest(v)) = detail::parse_value(rows[r][2]);
  }
  return f;
}

}  // namespace kinld::io
