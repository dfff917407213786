#include "hrp/sampler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hrp/linalg.hpp"

namespace hrp {

void EbmConfig::validate() const {
  if (K < 0 || K > 24) throw std::invalid_argument("EbmConfig: K out of range");
  if (d < 1) throw std::invalid_argument("EbmConfig: d must be >= 1");
  if (method == LevyMethod::BridgeSubdivision && m < 0)
    throw std::invalid_argument("EbmConfig: m must be >= 0");
  if (method == LevyMethod::TruncatedSeries && terms < 1)
    throw std::invalid_argument("EbmConfig: terms must be >= 1");
  if (flavor == Flavor::SmoothLift)
    throw std::invalid_argument("EbmConfig: flavor must be ito or stratonovich");
}

std::vector<double> sample_bm(int K, std::size_t d, RngStream& rng) {
  if (K < 0) throw std::invalid_argument("sample_bm: K must be >= 0");
  const std::size_t n = std::size_t{1} << K;
  const double sd = std::sqrt(std::ldexp(1.0, -K));
  std::vector<double> values((n + 1) * d, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t c = 0; c < d; ++c)
      values[i * d + c] = values[(i - 1) * d + c] + sd * rng.gaussian();
  return values;
}

std::vector<double> bridge_refine(const std::vector<double>& values,
                                  std::size_t d, double mesh, RngStream& rng) {
  if (values.size() % d != 0 || values.size() / d < 2)
    throw std::invalid_argument("bridge_refine: bad value array");
  const std::size_t n = values.size() / d - 1;
  const double sd = 0.5 * std::sqrt(mesh);
  std::vector<double> out((2 * n + 1) * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c)
      out[(2 * i) * d + c] = values[i * d + c];
    for (std::size_t c = 0; c < d; ++c) {
      const double a = values[i * d + c];
      const double b = values[(i + 1) * d + c];
      out[(2 * i + 1) * d + c] = 0.5 * (a + b) + sd * rng.gaussian();
    }
  }
  for (std::size_t c = 0; c < d; ++c) out[(2 * n) * d + c] = values[n * d + c];
  return out;
}

namespace {

// Second level of the piecewise-linear lift of `fine` relative to its first
// node, folded by Chen: sum over segments of (1/2) δ ⊗ δ + (x - x_start) ⊗ δ.
void pl_fold_level2(const std::vector<double>& fine, std::size_t d,
                    std::span<double> out) {
  const std::size_t segs = fine.size() / d - 1;
  for (std::size_t c = 0; c < d * d; ++c) out[c] = 0.0;
  for (std::size_t f = 0; f < segs; ++f) {
    const double* a = fine.data() + f * d;
    const double* b = fine.data() + (f + 1) * d;
    const double* start = fine.data();
    for (std::size_t r = 0; r < d; ++r) {
      const double dr = b[r] - a[r];
      const double sr = a[r] - start[r];
      for (std::size_t c = 0; c < d; ++c) {
        const double dc = b[c] - a[c];
        out[r * d + c] += 0.5 * dr * dc + sr * dc;
      }
    }
  }
}

}  // namespace

std::vector<double> levy_area_bridge(const std::vector<double>& values,
                                     std::size_t d, double mesh, int m,
                                     RngStream& rng) {
  if (m < 0) throw std::invalid_argument("levy_area_bridge: m must be >= 0");
  const std::size_t n = values.size() / d - 1;
  std::vector<double> adj(n * d * d);
  std::vector<double> local(2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      local[c] = values[i * d + c];
      local[d + c] = values[(i + 1) * d + c];
    }
    std::vector<double> fine = local;
    double h = mesh;
    for (int lev = 0; lev < m; ++lev) {
      fine = bridge_refine(fine, d, h, rng);
      h *= 0.5;
    }
    pl_fold_level2(fine, d, {adj.data() + i * d * d, d * d});
  }
  return adj;
}

void levy_area_series(std::span<const double> increment, double dt, int terms,
                      RngStream& rng, std::span<double> out) {
  if (terms < 1) throw std::invalid_argument("levy_area_series: terms must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("levy_area_series: dt must be > 0");
  const std::size_t d = increment.size();
  if (out.size() != d * d)
    throw std::invalid_argument("levy_area_series: bad output size");

  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out[r * d + c] = 0.5 * increment[r] * increment[c];
  // Scalar area has no antisymmetric part.
  if (d < 2) return;

  // Unit-interval bridge-area expansion: with mu = Δ/sqrt(dt),
  //   A_ij = (1/2π) Σ_{r>=1} (1/r) [ζ_{r,i}(η_{r,j} + √2 mu_j)
  //                                 - ζ_{r,j}(η_{r,i} + √2 mu_i)],
  // and the interval area scales as dt · A.
  const double inv_sqrt_dt = 1.0 / std::sqrt(dt);
  std::vector<double> mu(d);
  for (std::size_t c = 0; c < d; ++c) mu[c] = increment[c] * inv_sqrt_dt;
  std::vector<double> area(d * d, 0.0);
  std::vector<double> zeta(d), eta(d);
  const double sqrt2 = std::numbers::sqrt2;
  for (int r = 1; r <= terms; ++r) {
    for (std::size_t c = 0; c < d; ++c) zeta[c] = rng.gaussian();
    for (std::size_t c = 0; c < d; ++c) eta[c] = rng.gaussian();
    const double w = 1.0 / static_cast<double>(r);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j)
        area[i * d + j] += w * (zeta[i] * (eta[j] + sqrt2 * mu[j]) -
                                zeta[j] * (eta[i] + sqrt2 * mu[i]));
  }
  const double scale = dt / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double a = scale * area[i * d + j];
      out[i * d + j] += a;
      out[j * d + i] -= a;
    }
}

GridRoughPath sample_ebm(const EbmConfig& cfg, RngStream& rng) {
  cfg.validate();
  const std::size_t n = std::size_t{1} << cfg.K;
  const double mesh = std::ldexp(1.0, -cfg.K);
  std::vector<double> values = sample_bm(cfg.K, cfg.d, rng);

  std::vector<double> adj;
  if (cfg.method == LevyMethod::BridgeSubdivision) {
    adj = levy_area_bridge(values, cfg.d, mesh, cfg.m, rng);
  } else {
    adj.resize(n * cfg.d * cfg.d);
    std::vector<double> inc(cfg.d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < cfg.d; ++c)
        inc[c] = values[(i + 1) * cfg.d + c] - values[i * cfg.d + c];
      levy_area_series(inc, mesh, cfg.terms, rng,
                       {adj.data() + i * cfg.d * cfg.d, cfg.d * cfg.d});
    }
  }

  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    times[i] = static_cast<double>(i) * mesh;
  GridRoughPath strat(std::move(times), cfg.d, std::move(values),
                      std::move(adj), Flavor::Stratonovich);
  if (cfg.flavor == Flavor::Ito) return convert_flavor(strat, Flavor::Ito);
  return strat;
}

std::vector<MomentEstimate> moment_probe(const EbmConfig& cfg, double p,
                                         const std::vector<PairQuad>& pairs,
                                         int samples, std::uint64_t seed) {
  cfg.validate();
  if (cfg.d < 2) throw std::invalid_argument("moment_probe: needs d >= 2");
  if (samples < 100)
    throw std::invalid_argument("moment_probe: samples must be >= 100");
  const std::size_t n = std::size_t{1} << cfg.K;
  for (const auto& q : pairs)
    if (q.s > q.t || q.s2 > q.t2 || q.t > n || q.t2 > n)
      throw std::invalid_argument("moment_probe: pair indices out of range");

  const double e2 = 2.0 / p;
  const std::size_t np = pairs.size();
  // Per-sample statistics land in fixed slots; the reduction below is serial
  // and ordered, so the result is independent of the thread count.
  std::vector<double> sq(static_cast<std::size_t>(samples) * np);
#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < samples; ++s) {
    RngStream rng(seed, static_cast<std::uint64_t>(s));
    GridRoughPath beta = sample_ebm(cfg, rng);
    std::vector<double> l2(cfg.d * cfg.d);
    for (std::size_t q = 0; q < np; ++q) {
      const auto& pr = pairs[q];
      double z1 = 0.0, z2 = 0.0;
      if (pr.t > pr.s) {
        beta.level2_into(pr.s, pr.t, l2);
        z1 = l2[1] / std::pow(beta.times()[pr.t] - beta.times()[pr.s], e2);
      }
      if (pr.t2 > pr.s2) {
        beta.level2_into(pr.s2, pr.t2, l2);
        z2 = l2[1] / std::pow(beta.times()[pr.t2] - beta.times()[pr.s2], e2);
      }
      const double diff = z1 - z2;
      sq[static_cast<std::size_t>(s) * np + q] = diff * diff;
    }
  }

  std::vector<MomentEstimate> out(np);
  for (std::size_t q = 0; q < np; ++q) {
    // Neumaier-compensated sums keep the aggregation deterministic.
    double sum = 0.0, comp = 0.0, sum2 = 0.0, comp2 = 0.0;
    for (int s = 0; s < samples; ++s) {
      const double x = sq[static_cast<std::size_t>(s) * np + q];
      double t = sum + x;
      comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
      sum = t;
      const double xx = x * x;
      t = sum2 + xx;
      comp2 += (std::abs(sum2) >= std::abs(xx)) ? (sum2 - t) + xx : (xx - t) + sum2;
      sum2 = t;
    }
    const double ns = static_cast<double>(samples);
    const double mean = (sum + comp) / ns;
    const double var =
        ((sum2 + comp2) - ns * mean * mean) / (ns - 1.0);
    out[q].mean = mean;
    out[q].std_err = std::sqrt(var > 0.0 ? var / ns : 0.0);
  }
  return out;
}

}  // namespace hrp
