#include "hrp/approx.hpp"

#include <cmath>
#include <stdexcept>

namespace hrp {

GridRoughPath pl_lift(std::vector<double> times, std::size_t d,
                      std::vector<double> values) {
  if (times.size() < 2)
    throw std::invalid_argument("pl_lift: need at least two nodes");
  const std::size_t n = times.size() - 1;
  std::vector<double> adj(n * d * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < d; ++r) {
      const double dr = values[(i + 1) * d + r] - values[i * d + r];
      for (std::size_t c = 0; c < d; ++c) {
        const double dc = values[(i + 1) * d + c] - values[i * d + c];
        adj[i * d * d + r * d + c] = 0.5 * dr * dc;
      }
    }
  return GridRoughPath(std::move(times), d, std::move(values), std::move(adj),
                       Flavor::SmoothLift);
}

GridRoughPath pl_lift(const DyadicPath& h) {
  h.validate();
  const std::size_t n = std::size_t{1} << h.level;
  const double mesh = std::ldexp(1.0, -h.level);
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = static_cast<double>(i) * mesh;
  return pl_lift(std::move(times), h.d, h.values);
}

GridRoughPath coarsen(const GridRoughPath& x, int n) {
  int k = 0;
  if (!x.dyadic_depth(k))
    throw std::invalid_argument("coarsen: path must live on a dyadic grid");
  if (n < 0 || n > k)
    throw std::invalid_argument("coarsen: level must lie in [0, K]");
  const std::size_t d = x.dim();
  const std::size_t stride = std::size_t{1} << (k - n);
  const std::size_t n_fine = x.intervals();
  std::vector<double> vals((n_fine + 1) * d);
  for (std::size_t q = 0; q <= n_fine; ++q) {
    const std::size_t block = q / stride;
    const std::size_t r = q % stride;
    const double* a = x.values_flat().data() + (block * stride) * d;
    if (r == 0) {
      for (std::size_t c = 0; c < d; ++c) vals[q * d + c] = a[c];
    } else {
      const double* b = x.values_flat().data() + ((block + 1) * stride) * d;
      const double frac = static_cast<double>(r) / static_cast<double>(stride);
      for (std::size_t c = 0; c < d; ++c)
        vals[q * d + c] = a[c] + frac * (b[c] - a[c]);
    }
  }
  return pl_lift(x.times(), d, std::move(vals));
}

GridRoughPath adapted_approx(const GridRoughPath& x, int n) {
  return tau_shift(coarsen(x, n), std::ldexp(1.0, -n));
}

double cross_young(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("cross_young: paths must share a grid");
  double sum = 0.0;
  const double a0 = a[0];
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    sum += 0.5 * (a[i] + a[i + 1] - 2.0 * a0) * (b[i + 1] - b[i]);
  return sum;
}

GridRoughPath translate_values(const GridRoughPath& x,
                               std::span<const double> g) {
  const std::size_t d = x.dim();
  const std::size_t n = x.intervals();
  if (g.size() != (n + 1) * d)
    throw std::invalid_argument("translate_values: shift has wrong shape");
  std::vector<double> vals((n + 1) * d);
  for (std::size_t q = 0; q < vals.size(); ++q)
    vals[q] = x.values_flat()[q] + g[q];
  std::vector<double> adj = x.adjacent2_flat();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < d; ++r) {
      const double gr = g[(i + 1) * d + r] - g[i * d + r];
      const double wr = x.values_flat()[(i + 1) * d + r] -
                        x.values_flat()[i * d + r];
      for (std::size_t c = 0; c < d; ++c) {
        const double gc = g[(i + 1) * d + c] - g[i * d + c];
        const double wc = x.values_flat()[(i + 1) * d + c] -
                          x.values_flat()[i * d + c];
        adj[i * d * d + r * d + c] += 0.5 * gr * gc + 0.5 * (gr * wc + wr * gc);
      }
    }
  return GridRoughPath(x.times(), d, std::move(vals), std::move(adj),
                       x.flavor());
}

GridRoughPath translate(const GridRoughPath& x, const DyadicPath& h) {
  int k = 0;
  if (!x.dyadic_depth(k))
    throw std::invalid_argument("translate: path must live on a dyadic grid");
  if (h.d != x.dim())
    throw std::invalid_argument("translate: dimension mismatch");
  if (h.level > k)
    throw std::invalid_argument("translate: shift is finer than the grid");
  const std::vector<double> g = h.values_at_depth(k);
  return translate_values(x, g);
}

GridRoughPath girsanov_path(const GridRoughPath& x, const DyadicPath& h,
                            int n) {
  int k = 0;
  if (!x.dyadic_depth(k))
    throw std::invalid_argument("girsanov_path: path must live on a dyadic grid");
  if (h.d != x.dim())
    throw std::invalid_argument("girsanov_path: dimension mismatch");
  if (h.level > k || n > k)
    throw std::invalid_argument("girsanov_path: levels must not exceed K");
  const GridRoughPath ad = adapted_approx(x, n);
  const std::vector<double> hf = h.values_at_depth(k);
  std::vector<double> g(hf.size());
  for (std::size_t q = 0; q < g.size(); ++q)
    g[q] = hf[q] - ad.values_flat()[q];
  return translate_values(x, g);
}

void DyadicPath::validate() const {
  if (level < 0 || level > 30)
    throw std::invalid_argument("DyadicPath: bad level");
  if (d == 0) throw std::invalid_argument("DyadicPath: dimension must be >= 1");
  if (values.size() != nodes() * d)
    throw std::invalid_argument("DyadicPath: values have wrong size");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("DyadicPath: non-finite value");
}

std::vector<double> DyadicPath::values_at_depth(int K) const {
  validate();
  if (K < level)
    throw std::invalid_argument("DyadicPath: cannot interpolate to a coarser depth");
  const std::size_t stride = std::size_t{1} << (K - level);
  const std::size_t n_fine = std::size_t{1} << K;
  std::vector<double> out((n_fine + 1) * d);
  for (std::size_t q = 0; q <= n_fine; ++q) {
    const std::size_t block = q / stride;
    const std::size_t r = q % stride;
    if (r == 0) {
      for (std::size_t c = 0; c < d; ++c)
        out[q * d + c] = values[block * d + c];
    } else {
      const double frac = static_cast<double>(r) / static_cast<double>(stride);
      for (std::size_t c = 0; c < d; ++c) {
        const double a = values[block * d + c];
        const double b = values[(block + 1) * d + c];
        out[q * d + c] = a + frac * (b - a);
      }
    }
  }
  return out;
}

}  // namespace hrp
