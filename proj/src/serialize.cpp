#include "hrp/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hrp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_grid_rough_path(std::ostream& os, const GridRoughPath& x) {
  int k = 0;
  if (!x.dyadic_depth(k))
    throw std::invalid_argument(
        "write_grid_rough_path: format requires a dyadic grid");
  const std::size_t n = x.intervals();
  const std::size_t d = x.dim();
  os << d << ' ' << k << ' ' << to_string(x.flavor()) << '\n';
  for (std::size_t i = 0; i <= n; ++i) {
    os << format_double(x.times()[i]);
    for (std::size_t c = 0; c < d; ++c)
      os << ' ' << format_double(x.value(i)[c]);
    os << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto adj = x.adjacent2_at(i);
    for (std::size_t c = 0; c < d * d; ++c) {
      if (c) os << ' ';
      os << format_double(adj[c]);
    }
    os << '\n';
  }
}

void write_grid_rough_path(const std::string& path, const GridRoughPath& x) {
  auto os = open_out(path);
  write_grid_rough_path(os, x);
}

GridRoughPath read_grid_rough_path(std::istream& is) {
  std::size_t d = 0;
  int k = 0;
  std::string flavor_str;
  if (!(is >> d >> k >> flavor_str))
    throw std::runtime_error("rough path file: bad header");
  if (d == 0 || k < 0 || k > 30)
    throw std::runtime_error("rough path file: implausible header");
  const Flavor flavor = flavor_from_string(flavor_str);
  const std::size_t n = std::size_t{1} << k;
  std::vector<double> times(n + 1), values((n + 1) * d), adj(n * d * d);
  for (std::size_t i = 0; i <= n; ++i) {
    if (!(is >> times[i]))
      throw std::runtime_error("rough path file: truncated value rows");
    for (std::size_t c = 0; c < d; ++c)
      if (!(is >> values[i * d + c]))
        throw std::runtime_error("rough path file: truncated value rows");
  }
  for (std::size_t i = 0; i < n * d * d; ++i)
    if (!(is >> adj[i]))
      throw std::runtime_error("rough path file: truncated adjacent2 rows");
  return GridRoughPath(std::move(times), d, std::move(values), std::move(adj),
                       flavor);
}

GridRoughPath read_grid_rough_path(const std::string& path) {
  auto is = open_in(path);
  return read_grid_rough_path(is);
}

void write_dyadic_path(std::ostream& os, const DyadicPath& h) {
  h.validate();
  os << h.d << ' ' << h.level << '\n';
  for (std::size_t i = 0; i < h.nodes(); ++i) {
    for (std::size_t c = 0; c < h.d; ++c) {
      if (c) os << ' ';
      os << format_double(h.values[i * h.d + c]);
    }
    os << '\n';
  }
}

void write_dyadic_path(const std::string& path, const DyadicPath& h) {
  auto os = open_out(path);
  write_dyadic_path(os, h);
}

DyadicPath read_dyadic_path(std::istream& is) {
  DyadicPath h;
  if (!(is >> h.d >> h.level))
    throw std::runtime_error("dyadic path file: bad header");
  if (h.d == 0 || h.level < 0 || h.level > 30)
    throw std::runtime_error("dyadic path file: implausible header");
  h.values.resize(h.nodes() * h.d);
  for (auto& v : h.values)
    if (!(is >> v)) throw std::runtime_error("dyadic path file: truncated rows");
  h.validate();
  return h;
}

DyadicPath read_dyadic_path(const std::string& path) {
  auto is = open_in(path);
  return read_dyadic_path(is);
}

void write_solution_path(std::ostream& os, const std::vector<double>& times,
                         std::size_t out_dim,
                         const std::vector<double>& values) {
  if (values.size() != times.size() * out_dim)
    throw std::invalid_argument("write_solution_path: shape mismatch");
  const std::size_t n = times.size() - 1;
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  os << out_dim << ' ' << k << '\n';
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_double(times[i]);
    for (std::size_t c = 0; c < out_dim; ++c)
      os << ' ' << format_double(values[i * out_dim + c]);
    os << '\n';
  }
}

void write_solution_path(const std::string& path,
                         const std::vector<double>& times, std::size_t out_dim,
                         const std::vector<double>& values) {
  auto os = open_out(path);
  write_solution_path(os, times, out_dim, values);
}

}  // namespace hrp
