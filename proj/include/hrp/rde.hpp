#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hrp/approx_types.hpp"
#include "hrp/metrics.hpp"
#include "hrp/rough_path.hpp"

namespace hrp {

// Vector field f: R^N -> L(R^d, R^N) with first derivative.
//   eval:  y -> f(y), flat N×d row-major (f[a*d + c] = f^a_c)
//   deriv: y -> Df(y), flat N×N×d (df[(a*N + b)*d + c] = ∂f^a_c / ∂y^b)
struct VectorFieldSpec {
  std::size_t out_dim = 0;  // N
  std::size_t in_dim = 0;   // d
  std::function<void(std::span<const double>, std::span<double>)> eval;
  std::function<void(std::span<const double>, std::span<double>)> deriv;
  std::string name;
  double lipschitz_hint = 0.0;  // 0 = unknown
};

VectorFieldSpec make_zero_field(std::size_t out_dim, std::size_t in_dim);
// f(y) = c, constant N×d matrix (additive dynamics).
VectorFieldSpec make_constant_field(std::size_t out_dim, std::size_t in_dim,
                                    std::vector<double> matrix);
// d = N = 1, f(y) = y.
VectorFieldSpec make_linear_scalar_field();
// Named fields for the CLI: "rotation" (N=2, d=1), "tanh" (diagonal bounded,
// any N = d).
VectorFieldSpec field_by_name(const std::string& name, std::size_t dim);

// Central finite-difference check of deriv against eval at `probes` random
// points; true iff all components agree within rtol relative to scale.
bool validate_field(const VectorFieldSpec& f, int probes, RngStream& rng,
                    double rtol = 1e-5);

// Solution of dy = f(y) dx at the driver's grid nodes.
struct SolutionPath {
  std::vector<double> times;
  std::size_t out_dim = 0;
  std::vector<double> values;  // (N+1) × out_dim

  std::span<const double> value(std::size_t i) const {
    return {values.data() + i * out_dim, out_dim};
  }
};

// One second-order (Davie) step per grid interval:
//   y_{i+1} = y_i + f(y_i) X¹_i + Df(y_i)[f(y_i)] : X²_i
// Throws std::runtime_error naming the step index if the state leaves the
// finite range.
SolutionPath solve(const GridRoughPath& x, const VectorFieldSpec& f,
                   std::span<const double> y0);

// Level-2 lift of the solution: Y²_i^{ab} = Σ_{c,e} f^a_c f^b_e X²_i^{ce}
// per interval, composed by Chen.
GridRoughPath lift_solution(const SolutionPath& y, const GridRoughPath& x,
                            const VectorFieldSpec& f);

// Path projection of the Itô-map (the solution values pinned at y0).
std::vector<double> ito_map_path(const GridRoughPath& x,
                                 const VectorFieldSpec& f,
                                 std::span<const double> y0);

struct LipschitzProbe {
  double rho_in = 0.0;
  double rho_out = 0.0;
  double ratio = 0.0;
  bool degenerate = false;  // rho_in == 0; ratio is NaN
};

LipschitzProbe lipschitz_probe(const VectorFieldSpec& f, const GridRoughPath& x,
                               const GridRoughPath& xhat,
                               const HolderParams& prm,
                               std::span<const double> y0);

// Control ODE dy = f(y) dh for a dyadic h, solved through the lift of h
// refined `refine` extra dyadic levels.
SolutionPath control_ode(const DyadicPath& h, const VectorFieldSpec& f,
                         std::span<const double> y0, int refine);

struct ControlReport {
  double c_in = 0.0;
  double c_out = 0.0;
  double ratio = 0.0;  // c_out / max(c_in, 1)
  bool ok = false;
};

// Grid control constants of driver and solution (NormReport.control_constant),
// the empirical shadow of the universal-limit estimates.
ControlReport control_report(const GridRoughPath& x, const GridRoughPath& y,
                             const HolderParams& prm);

}  // namespace hrp
