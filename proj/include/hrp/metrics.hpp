#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hrp/rng.hpp"
#include "hrp/rough_path.hpp"

namespace hrp {

// Result of a grid Hölder-norm scan. value = max over levels of the
// supremum quotient sup |X^k_{s,t}| / |t-s|^{k/p}; arg pair is the grid pair
// attaining it (first such pair in lexicographic (i,j) order).
// control_constant is the least C with |X^k_{s,t}|^{p/k} <= C |t-s| over the
// grid, i.e. max_k per_level[k]^{p/k}.
struct NormReport {
  double value = 0.0;
  std::size_t arg_s = 0;
  std::size_t arg_t = 0;
  double per_level[2] = {0.0, 0.0};
  std::size_t arg_s_level[2] = {0, 0};
  std::size_t arg_t_level[2] = {0, 0};
  double control_constant = 0.0;
};

// Exhaustive O(N²) scan over grid pairs. Level 1 uses the Euclidean norm,
// level 2 the Frobenius norm. The OpenMP kernel and the serial reference
// produce bit-identical reports.
NormReport holder_norm(const GridRoughPath& x, const HolderParams& prm);
NormReport holder_norm_serial(const GridRoughPath& x, const HolderParams& prm);

// Hölder metric rho(X,Y) = ||X - Y|| on a shared grid (levelwise differences
// of queried increments). Throws on grid mismatch.
double rho(const GridRoughPath& x, const GridRoughPath& y,
           const HolderParams& prm);
NormReport rho_report(const GridRoughPath& x, const GridRoughPath& y,
                      const HolderParams& prm);
NormReport rho_report_serial(const GridRoughPath& x, const GridRoughPath& y,
                             const HolderParams& prm);

// One pass that buckets pairs by their position relative to a split index m:
// early (i < j <= m), straddling (i < m < j), late (m <= i < j). The overall
// rho is the max of the three zone values.
struct ZoneReports {
  NormReport early, straddle, late;
};
ZoneReports rho_zone_reports(const GridRoughPath& x, const GridRoughPath& y,
                             const HolderParams& prm, std::size_t split);

// p-variation metric with partitions restricted to grid points, via the
// dynamic programme best[j] = max_{i<j} best[i] + |diff(i,j)|^{p/k} per level.
double pvar_dist(const GridRoughPath& x, const GridRoughPath& y,
                 const HolderParams& prm);
double pvar_dist_serial(const GridRoughPath& x, const GridRoughPath& y,
                        const HolderParams& prm);

// Two-parameter regularity field Z^k: Z[i][j] = X^k_{t_i,t_j} / (t_j-t_i)^{k/p}
// for i < j, zero otherwise. Dense table, (N+1)² * d^k doubles.
struct ZField {
  int level = 1;        // k in {1,2}
  std::size_t n = 0;    // N intervals
  std::size_t comps = 1;  // d^k
  std::vector<double> times;
  std::vector<double> data;  // (N+1)*(N+1)*comps

  std::span<const double> at(std::size_t i, std::size_t j) const {
    return {data.data() + (i * (n + 1) + j) * comps, comps};
  }
};

ZField z_field(const GridRoughPath& x, const HolderParams& prm, int level);

// Sampled lower bound for the two-parameter Hölder quotient
// sup |Z_{s,t} - Z_{s',t'}| / (|t'-t| + |s'-s|)^exponent: all adjacent-index
// moves plus `budget` uniformly sampled pairs of pairs (which may touch the
// zero diagonal; that convention is part of the estimate). Nondecreasing in
// budget for a freshly seeded rng.
double two_param_holder_estimate(const ZField& z, double exponent,
                                 std::size_t budget, RngStream& rng);

}  // namespace hrp
