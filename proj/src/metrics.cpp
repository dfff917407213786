#include "hrp/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hrp {

namespace {

// Denominators |t_j - t_i|^{k/p}. On an exactly dyadic grid t_j - t_i equals
// gap * 2^-K bitwise, so a gap-indexed table of std::pow values is
// bit-identical to calling std::pow per pair (same argument, same libm).
struct Denoms {
  bool table = false;
  std::vector<double> p1, p2;
  double e1 = 0.0, e2 = 0.0;
  const std::vector<double>* times = nullptr;

  double den1(std::size_t i, std::size_t j) const {
    return table ? p1[j - i] : std::pow((*times)[j] - (*times)[i], e1);
  }
  double den2(std::size_t i, std::size_t j) const {
    return table ? p2[j - i] : std::pow((*times)[j] - (*times)[i], e2);
  }
};

Denoms make_denoms(const GridRoughPath& x, double p) {
  Denoms d;
  d.e1 = 1.0 / p;
  d.e2 = 2.0 / p;
  d.times = &x.times();
  int k = 0;
  if (x.dyadic_depth(k)) {
    const std::size_t n = x.intervals();
    const double mesh = std::ldexp(1.0, -k);
    d.table = true;
    d.p1.resize(n + 1);
    d.p2.resize(n + 1);
    d.p1[0] = d.p2[0] = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
      const double dt = static_cast<double>(m) * mesh;
      d.p1[m] = std::pow(dt, d.e1);
      d.p2[m] = std::pow(dt, d.e2);
    }
  }
  return d;
}

// Norms of the queried increment of x (or of x minus y when y != nullptr)
// over [t_i, t_j]: Euclidean on level 1, Frobenius on level 2, both
// accumulated in component order.
inline void pair_norms(const GridRoughPath& x, const GridRoughPath* y,
                       std::size_t i, std::size_t j, double& n1, double& n2) {
  const std::size_t d = x.dim();
  const double* xv = x.values_flat().data();
  const double* xp = x.prefix2_flat().data();

  double s1 = 0.0;
  if (!y) {
    for (std::size_t c = 0; c < d; ++c) {
      const double a = xv[j * d + c] - xv[i * d + c];
      s1 += a * a;
    }
  } else {
    const double* yv = y->values_flat().data();
    for (std::size_t c = 0; c < d; ++c) {
      const double a = (xv[j * d + c] - xv[i * d + c]) -
                       (yv[j * d + c] - yv[i * d + c]);
      s1 += a * a;
    }
  }
  n1 = std::sqrt(s1);

  double s2 = 0.0;
  const std::size_t dd = d * d;
  if (!y) {
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const double e = (xp[j * dd + r * d + c] - xp[i * dd + r * d + c]) -
                         (xv[i * d + r] - xv[r]) *
                             (xv[j * d + c] - xv[i * d + c]);
        s2 += e * e;
      }
  } else {
    const double* yv = y->values_flat().data();
    const double* yp = y->prefix2_flat().data();
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const double ex = (xp[j * dd + r * d + c] - xp[i * dd + r * d + c]) -
                          (xv[i * d + r] - xv[r]) *
                              (xv[j * d + c] - xv[i * d + c]);
        const double ey = (yp[j * dd + r * d + c] - yp[i * dd + r * d + c]) -
                          (yv[i * d + r] - yv[r]) *
                              (yv[j * d + c] - yv[i * d + c]);
        const double e = ex - ey;
        s2 += e * e;
      }
  }
  n2 = std::sqrt(s2);
}

struct LevelBest {
  double q = 0.0;
  std::size_t i = 0, j = 0;
};

NormReport assemble(const LevelBest& b1, const LevelBest& b2, double p) {
  NormReport rep;
  rep.per_level[0] = b1.q;
  rep.per_level[1] = b2.q;
  rep.arg_s_level[0] = b1.i;
  rep.arg_t_level[0] = b1.j;
  rep.arg_s_level[1] = b2.i;
  rep.arg_t_level[1] = b2.j;
  if (b2.q > b1.q) {
    rep.value = b2.q;
    rep.arg_s = b2.i;
    rep.arg_t = b2.j;
  } else {
    rep.value = b1.q;
    rep.arg_s = b1.i;
    rep.arg_t = b1.j;
  }
  const double c1 = std::pow(rep.per_level[0], p);
  const double c2 = std::pow(rep.per_level[1], p / 2.0);
  rep.control_constant = c1 > c2 ? c1 : c2;
  return rep;
}

NormReport scan_serial(const GridRoughPath& x, const GridRoughPath* y,
                       const HolderParams& prm) {
  const std::size_t n = x.intervals();
  const Denoms den = make_denoms(x, prm.p);
  LevelBest b1, b2;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      double n1, n2;
      pair_norms(x, y, i, j, n1, n2);
      const double q1 = n1 / den.den1(i, j);
      const double q2 = n2 / den.den2(i, j);
      if (q1 > b1.q) b1 = {q1, i, j};
      if (q2 > b2.q) b2 = {q2, i, j};
    }
  return assemble(b1, b2, prm.p);
}

// Row-parallel scan. Each row's best is found independently; rows combine in
// ascending order with strict comparisons, which reproduces the serial
// lexicographic-first argmax bit for bit for any thread count.
NormReport scan_parallel(const GridRoughPath& x, const GridRoughPath* y,
                         const HolderParams& prm) {
  const std::size_t n = x.intervals();
  const Denoms den = make_denoms(x, prm.p);
  std::vector<LevelBest> row1(n), row2(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
    const std::size_t i = static_cast<std::size_t>(is);
    LevelBest b1, b2;
    for (std::size_t j = i + 1; j <= n; ++j) {
      double n1, n2;
      pair_norms(x, y, i, j, n1, n2);
      const double q1 = n1 / den.den1(i, j);
      const double q2 = n2 / den.den2(i, j);
      if (q1 > b1.q) b1 = {q1, i, j};
      if (q2 > b2.q) b2 = {q2, i, j};
    }
    row1[i] = b1;
    row2[i] = b2;
  }
  LevelBest b1, b2;
  for (std::size_t i = 0; i < n; ++i) {
    if (row1[i].q > b1.q) b1 = row1[i];
    if (row2[i].q > b2.q) b2 = row2[i];
  }
  return assemble(b1, b2, prm.p);
}

void require_same_grid(const GridRoughPath& x, const GridRoughPath& y) {
  if (!x.same_grid(y))
    throw std::invalid_argument("rho/pvar: paths must share the same grid");
}

double pvar_level(const GridRoughPath& x, const GridRoughPath* y, int level,
                  double p, bool parallel) {
  const std::size_t n = x.intervals();
  const double expo = p / static_cast<double>(level);
  std::vector<double> best(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    double b = 0.0;
    bool first = true;
    if (parallel) {
      double bmax = -1.0;
#pragma omp parallel for reduction(max : bmax) schedule(static)
      for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(j); ++is) {
        const std::size_t i = static_cast<std::size_t>(is);
        double n1, n2;
        pair_norms(x, y, i, j, n1, n2);
        const double w = std::pow(level == 1 ? n1 : n2, expo);
        const double cand = best[i] + w;
        if (cand > bmax) bmax = cand;
      }
      b = bmax;
    } else {
      for (std::size_t i = 0; i < j; ++i) {
        double n1, n2;
        pair_norms(x, y, i, j, n1, n2);
        const double w = std::pow(level == 1 ? n1 : n2, expo);
        const double cand = best[i] + w;
        if (first || cand > b) {
          b = cand;
          first = false;
        }
      }
    }
    best[j] = b;
  }
  return best[n];
}

double pvar_impl(const GridRoughPath& x, const GridRoughPath& y,
                 const HolderParams& prm, bool parallel) {
  require_same_grid(x, y);
  prm.validate();
  const GridRoughPath* yp = &y;
  const double v1 = std::pow(pvar_level(x, yp, 1, prm.p, parallel), 1.0 / prm.p);
  const double v2 = std::pow(pvar_level(x, yp, 2, prm.p, parallel), 2.0 / prm.p);
  return v1 > v2 ? v1 : v2;
}

}  // namespace

NormReport holder_norm(const GridRoughPath& x, const HolderParams& prm) {
  prm.validate();
  if (x.intervals() < 1) throw std::invalid_argument("holder_norm: empty grid");
  return scan_parallel(x, nullptr, prm);
}

NormReport holder_norm_serial(const GridRoughPath& x, const HolderParams& prm) {
  prm.validate();
  if (x.intervals() < 1) throw std::invalid_argument("holder_norm: empty grid");
  return scan_serial(x, nullptr, prm);
}

NormReport rho_report(const GridRoughPath& x, const GridRoughPath& y,
                      const HolderParams& prm) {
  prm.validate();
  require_same_grid(x, y);
  return scan_parallel(x, &y, prm);
}

NormReport rho_report_serial(const GridRoughPath& x, const GridRoughPath& y,
                             const HolderParams& prm) {
  prm.validate();
  require_same_grid(x, y);
  return scan_serial(x, &y, prm);
}

double rho(const GridRoughPath& x, const GridRoughPath& y,
           const HolderParams& prm) {
  return rho_report(x, y, prm).value;
}

ZoneReports rho_zone_reports(const GridRoughPath& x, const GridRoughPath& y,
                             const HolderParams& prm, std::size_t split) {
  prm.validate();
  require_same_grid(x, y);
  const std::size_t n = x.intervals();
  if (split > n)
    throw std::invalid_argument("rho_zone_reports: split index out of range");
  const Denoms den = make_denoms(x, prm.p);
  LevelBest best[3][2];  // zone (early/straddle/late) x level
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) {
      double n1, n2;
      pair_norms(x, &y, i, j, n1, n2);
      const double q1 = n1 / den.den1(i, j);
      const double q2 = n2 / den.den2(i, j);
      const int zone = (j <= split) ? 0 : (i >= split ? 2 : 1);
      if (q1 > best[zone][0].q) best[zone][0] = {q1, i, j};
      if (q2 > best[zone][1].q) best[zone][1] = {q2, i, j};
    }
  ZoneReports out;
  out.early = assemble(best[0][0], best[0][1], prm.p);
  out.straddle = assemble(best[1][0], best[1][1], prm.p);
  out.late = assemble(best[2][0], best[2][1], prm.p);
  return out;
}

double pvar_dist(const GridRoughPath& x, const GridRoughPath& y,
                 const HolderParams& prm) {
  return pvar_impl(x, y, prm, true);
}

double pvar_dist_serial(const GridRoughPath& x, const GridRoughPath& y,
                        const HolderParams& prm) {
  return pvar_impl(x, y, prm, false);
}

ZField z_field(const GridRoughPath& x, const HolderParams& prm, int level) {
  prm.validate();
  if (level != 1 && level != 2)
    throw std::invalid_argument("z_field: level must be 1 or 2");
  const std::size_t n = x.intervals();
  const std::size_t d = x.dim();
  const std::size_t comps = level == 1 ? d : d * d;
  ZField z;
  z.level = level;
  z.n = n;
  z.comps = comps;
  z.times = x.times();
  z.data.assign((n + 1) * (n + 1) * comps, 0.0);
  const Denoms den = make_denoms(x, prm.p);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t is = 0; is < static_cast<std::ptrdiff_t>(n); ++is) {
    const std::size_t i = static_cast<std::size_t>(is);
    std::vector<double> buf(comps);
    for (std::size_t j = i + 1; j <= n; ++j) {
      if (level == 1)
        x.level1_into(i, j, buf);
      else
        x.level2_into(i, j, buf);
      const double dn = level == 1 ? den.den1(i, j) : den.den2(i, j);
      double* out = z.data.data() + (i * (n + 1) + j) * comps;
      for (std::size_t c = 0; c < comps; ++c) out[c] = buf[c] / dn;
    }
  }
  return z;
}

double two_param_holder_estimate(const ZField& z, double exponent,
                                 std::size_t budget, RngStream& rng) {
  if (!(exponent > 0.0))
    throw std::invalid_argument("two_param_holder_estimate: exponent must be > 0");
  if (budget < 1)
    throw std::invalid_argument("two_param_holder_estimate: budget must be >= 1");
  if (z.n < 2)
    throw std::invalid_argument("two_param_holder_estimate: degenerate grid");
  const std::size_t n = z.n;
  const std::size_t comps = z.comps;

  auto dist = [&](std::size_t ai, std::size_t aj, std::size_t bi,
                  std::size_t bj) {
    const double* a = z.data.data() + (ai * (n + 1) + aj) * comps;
    const double* b = z.data.data() + (bi * (n + 1) + bj) * comps;
    double s = 0.0;
    for (std::size_t c = 0; c < comps; ++c) {
      const double e = a[c] - b[c];
      s += e * e;
    }
    return std::sqrt(s);
  };

  double best = 0.0;
  // (a) every single-index move to a grid neighbour
#pragma omp parallel for reduction(max : best) schedule(static)
  for (std::ptrdiff_t is = 0; is <= static_cast<std::ptrdiff_t>(n); ++is) {
    const std::size_t i = static_cast<std::size_t>(is);
    for (std::size_t j = 0; j <= n; ++j) {
      if (i + 1 <= n) {
        const double dn = std::pow(z.times[i + 1] - z.times[i], exponent);
        const double q = dist(i, j, i + 1, j) / dn;
        if (q > best) best = q;
      }
      if (j + 1 <= n) {
        const double dn = std::pow(z.times[j + 1] - z.times[j], exponent);
        const double q = dist(i, j, i, j + 1) / dn;
        if (q > best) best = q;
      }
    }
  }
  // (b) uniformly sampled pairs of pairs
  for (std::size_t t = 0; t < budget; ++t) {
    const std::size_t ai = rng.uniform_index(n + 1);
    const std::size_t aj = rng.uniform_index(n + 1);
    const std::size_t bi = rng.uniform_index(n + 1);
    const std::size_t bj = rng.uniform_index(n + 1);
    if (ai == bi && aj == bj) continue;
    const double move = std::abs(z.times[bi] - z.times[ai]) +
                        std::abs(z.times[bj] - z.times[aj]);
    const double q = dist(ai, aj, bi, bj) / std::pow(move, exponent);
    if (q > best) best = q;
  }
  return best;
}

}  // namespace hrp
