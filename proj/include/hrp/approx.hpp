#pragma once

#include <span>
#include <vector>

#include "hrp/approx_types.hpp"
#include "hrp/rough_path.hpp"

namespace hrp {

// Piecewise-linear lift: adjacent2[i] = (1/2) Δ_i ⊗ Δ_i, the exact iterated
// integral of a line segment. Works on any strictly increasing grid.
GridRoughPath pl_lift(std::vector<double> times, std::size_t d,
                      std::vector<double> values);
GridRoughPath pl_lift(const DyadicPath& h);

// Dyadic coarsening β(n): subsample the depth-K path at depth-n nodes,
// interpolate linearly back onto the depth-K grid and lift. Shares the grid
// of x, so rho(x, coarsen(x, n)) is well defined.
GridRoughPath coarsen(const GridRoughPath& x, int n);

// Adapted approximation β^ad(n) = tau_shift(coarsen(x, n), 2^-n).
GridRoughPath adapted_approx(const GridRoughPath& x, int n);

// Young integral ∫ (a_u - a_0) db_u on a shared grid by the trapezoidal rule
// Σ (1/2)(a_i + a_{i+1} - 2 a_0)(b_{i+1} - b_i); exact for piecewise-linear
// integrand and integrator with shared breakpoints.
double cross_young(std::span<const double> a, std::span<const double> b);

// Cameron-Martin-type translation by a path g given on x's grid:
//   values'  = values + g
//   adjacent2'[i] += (1/2) Δg ⊗ Δg + (1/2)(Δg ⊗ Δω + Δω ⊗ Δg)
// (the per-interval trapezoidal cross Young terms).
GridRoughPath translate_values(const GridRoughPath& x,
                               std::span<const double> g);

// Translation by a dyadic path (interpolated to x's depth first).
GridRoughPath translate(const GridRoughPath& x, const DyadicPath& h);

// Girsanov-shift path T_n^h(ω) = ω - ω^ad(n) + h with the full second-level
// cross-term expansion, assembled per interval.
GridRoughPath girsanov_path(const GridRoughPath& x, const DyadicPath& h,
                            int n);

}  // namespace hrp
