#pragma once

#include <iosfwd>
#include <string>

#include "hrp/approx_types.hpp"
#include "hrp/rough_path.hpp"

namespace hrp {

// Columnar text format for dyadic-grid rough paths:
//   header line:  d K flavor
//   N+1 lines:    t_i  x_i[0] ... x_i[d-1]
//   N lines:      d² adjacent2 entries, row-major
// Numbers are written with 17 significant digits, which round-trips doubles
// bit-exactly.
void write_grid_rough_path(std::ostream& os, const GridRoughPath& x);
void write_grid_rough_path(const std::string& path, const GridRoughPath& x);
GridRoughPath read_grid_rough_path(std::istream& is);
GridRoughPath read_grid_rough_path(const std::string& path);

// Dyadic path files: header `d m`, then 2^m + 1 value rows.
void write_dyadic_path(std::ostream& os, const DyadicPath& h);
void write_dyadic_path(const std::string& path, const DyadicPath& h);
DyadicPath read_dyadic_path(std::istream& is);
DyadicPath read_dyadic_path(const std::string& path);

// Solution files: header `N K`, then rows `t_i y_i[0..N)`.
void write_solution_path(std::ostream& os, const std::vector<double>& times,
                         std::size_t out_dim, const std::vector<double>& values);
void write_solution_path(const std::string& path,
                         const std::vector<double>& times, std::size_t out_dim,
                         const std::vector<double>& values);

// 17-significant-digit formatting used by every writer (and the CSV outputs).
std::string format_double(double v);

}  // namespace hrp
