#include "hrp/rde.hpp"

#include <cmath>
#include <stdexcept>

#include "hrp/approx.hpp"

namespace hrp {

VectorFieldSpec make_zero_field(std::size_t out_dim, std::size_t in_dim) {
  VectorFieldSpec f;
  f.out_dim = out_dim;
  f.in_dim = in_dim;
  f.name = "zero";
  f.lipschitz_hint = 0.0;
  f.eval = [](std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  f.deriv = [](std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  return f;
}

VectorFieldSpec make_constant_field(std::size_t out_dim, std::size_t in_dim,
                                    std::vector<double> matrix) {
  if (matrix.size() != out_dim * in_dim)
    throw std::invalid_argument("make_constant_field: matrix must be N×d");
  VectorFieldSpec f;
  f.out_dim = out_dim;
  f.in_dim = in_dim;
  f.name = "constant";
  f.eval = [m = std::move(matrix)](std::span<const double>,
                                   std::span<double> out) {
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = m[q];
  };
  f.deriv = [](std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
  };
  return f;
}

VectorFieldSpec make_linear_scalar_field() {
  VectorFieldSpec f;
  f.out_dim = 1;
  f.in_dim = 1;
  f.name = "linear-scalar";
  f.lipschitz_hint = 1.0;
  f.eval = [](std::span<const double> y, std::span<double> out) {
    out[0] = y[0];
  };
  f.deriv = [](std::span<const double>, std::span<double> out) {
    out[0] = 1.0;
  };
  return f;
}

VectorFieldSpec field_by_name(const std::string& name, std::size_t dim) {
  if (name == "linear-scalar") return make_linear_scalar_field();
  if (name == "rotation") {
    // N = 2, d = 1: dy = J y dx with J the quarter turn.
    VectorFieldSpec f;
    f.out_dim = 2;
    f.in_dim = 1;
    f.name = "rotation";
    f.lipschitz_hint = 1.0;
    f.eval = [](std::span<const double> y, std::span<double> out) {
      out[0] = -y[1];
      out[1] = y[0];
    };
    f.deriv = [](std::span<const double>, std::span<double> out) {
      // df[(a*2 + b)*1] = ∂f^a/∂y^b
      out[0] = 0.0;   // ∂f0/∂y0
      out[1] = -1.0;  // ∂f0/∂y1
      out[2] = 1.0;   // ∂f1/∂y0
      out[3] = 0.0;   // ∂f1/∂y1
    };
    return f;
  }
  if (name == "tanh") {
    // Diagonal bounded field, N = d = dim: f^a_c(y) = δ_{ac} tanh(y_a).
    VectorFieldSpec f;
    f.out_dim = dim;
    f.in_dim = dim;
    f.name = "tanh";
    f.lipschitz_hint = 1.0;
    f.eval = [dim](std::span<const double> y, std::span<double> out) {
      for (auto& v : out) v = 0.0;
      for (std::size_t a = 0; a < dim; ++a)
        out[a * dim + a] = std::tanh(y[a]);
    };
    f.deriv = [dim](std::span<const double> y, std::span<double> out) {
      for (auto& v : out) v = 0.0;
      for (std::size_t a = 0; a < dim; ++a) {
        const double t = std::tanh(y[a]);
        out[(a * dim + a) * dim + a] = 1.0 - t * t;
      }
    };
    return f;
  }
  throw std::invalid_argument("unknown vector field: " + name);
}

bool validate_field(const VectorFieldSpec& f, int probes, RngStream& rng,
                    double rtol) {
  const std::size_t N = f.out_dim, d = f.in_dim;
  std::vector<double> y(N), fp(N * d), fm(N * d), df(N * N * d);
  const double h = 1e-5;
  for (int t = 0; t < probes; ++t) {
    for (auto& v : y) v = rng.gaussian();
    f.deriv(y, df);
    for (std::size_t b = 0; b < N; ++b) {
      const double yb = y[b];
      y[b] = yb + h;
      f.eval(y, fp);
      y[b] = yb - h;
      f.eval(y, fm);
      y[b] = yb;
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t c = 0; c < d; ++c) {
          const double fd = (fp[a * d + c] - fm[a * d + c]) / (2.0 * h);
          const double an = df[(a * N + b) * d + c];
          const double scale = 1.0 + std::abs(an) + std::abs(fd);
          if (std::abs(fd - an) > rtol * scale) return false;
        }
    }
  }
  return true;
}

SolutionPath solve(const GridRoughPath& x, const VectorFieldSpec& f,
                   std::span<const double> y0) {
  if (f.in_dim != x.dim())
    throw std::invalid_argument("solve: field input dimension must match driver");
  if (y0.size() != f.out_dim)
    throw std::invalid_argument("solve: y0 has wrong dimension");
  const std::size_t N = f.out_dim, d = f.in_dim;
  const std::size_t n = x.intervals();

  SolutionPath sol;
  sol.times = x.times();
  sol.out_dim = N;
  sol.values.assign((n + 1) * N, 0.0);
  for (std::size_t a = 0; a < N; ++a) sol.values[a] = y0[a];

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> fv(N * d), df(N * N * d), w(N * d);
  for (std::size_t i = 0; i < n; ++i) {
    f.eval(y, fv);
    f.deriv(y, df);
    const double* vi = x.values_flat().data() + i * d;
    const double* vj = x.values_flat().data() + (i + 1) * d;
    const auto x2 = x.adjacent2_at(i);
    // w[b*d + e] = Σ_c f^b_c X²^{ce}
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t e = 0; e < d; ++e) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c)
          s += fv[b * d + c] * x2[c * d + e];
        w[b * d + e] = s;
      }
    for (std::size_t a = 0; a < N; ++a) {
      double step = 0.0;
      for (std::size_t c = 0; c < d; ++c)
        step += fv[a * d + c] * (vj[c] - vi[c]);
      for (std::size_t b = 0; b < N; ++b)
        for (std::size_t e = 0; e < d; ++e)
          step += df[(a * N + b) * d + e] * w[b * d + e];
      y[a] += step;
    }
    for (std::size_t a = 0; a < N; ++a) {
      if (!std::isfinite(y[a]))
        throw std::runtime_error("solve: state blew up at step " +
                                 std::to_string(i + 1));
      sol.values[(i + 1) * N + a] = y[a];
    }
  }
  return sol;
}

GridRoughPath lift_solution(const SolutionPath& y, const GridRoughPath& x,
                            const VectorFieldSpec& f) {
  if (y.times != x.times())
    throw std::invalid_argument("lift_solution: solution grid must match driver");
  const std::size_t N = f.out_dim, d = f.in_dim;
  const std::size_t n = x.intervals();
  std::vector<double> adj(n * N * N);
  std::vector<double> fv(N * d), tmp(N * d);
  std::vector<double> yv(N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < N; ++a) yv[a] = y.values[i * N + a];
    f.eval(yv, fv);
    const auto x2 = x.adjacent2_at(i);
    // tmp[a*d + e] = Σ_c f^a_c X²^{ce}
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t e = 0; e < d; ++e) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c)
          s += fv[a * d + c] * x2[c * d + e];
        tmp[a * d + e] = s;
      }
    // Y²^{ab} = Σ_e tmp[a,e] f^b_e
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) {
        double s = 0.0;
        for (std::size_t e = 0; e < d; ++e)
          s += tmp[a * d + e] * fv[b * d + e];
        adj[i * N * N + a * N + b] = s;
      }
  }
  return GridRoughPath(x.times(), N, y.values, std::move(adj), x.flavor());
}

std::vector<double> ito_map_path(const GridRoughPath& x,
                                 const VectorFieldSpec& f,
                                 std::span<const double> y0) {
  return solve(x, f, y0).values;
}

LipschitzProbe lipschitz_probe(const VectorFieldSpec& f, const GridRoughPath& x,
                               const GridRoughPath& xhat,
                               const HolderParams& prm,
                               std::span<const double> y0) {
  LipschitzProbe out;
  out.rho_in = rho(x, xhat, prm);
  if (out.rho_in == 0.0) {
    out.degenerate = true;
    out.ratio = std::nan("");
    return out;
  }
  const SolutionPath y = solve(x, f, y0);
  const SolutionPath yh = solve(xhat, f, y0);
  const GridRoughPath ly = lift_solution(y, x, f);
  const GridRoughPath lyh = lift_solution(yh, xhat, f);
  out.rho_out = rho(ly, lyh, prm);
  out.ratio = out.rho_out / out.rho_in;
  return out;
}

SolutionPath control_ode(const DyadicPath& h, const VectorFieldSpec& f,
                         std::span<const double> y0, int refine) {
  if (refine < 0) throw std::invalid_argument("control_ode: refine must be >= 0");
  DyadicPath hr;
  hr.level = h.level + refine;
  hr.d = h.d;
  hr.values = h.values_at_depth(hr.level);
  return solve(pl_lift(hr), f, y0);
}

ControlReport control_report(const GridRoughPath& x, const GridRoughPath& y,
                             const HolderParams& prm) {
  if (x.times() != y.times())
    throw std::invalid_argument("control_report: paths must share a grid");
  ControlReport rep;
  rep.c_in = holder_norm(x, prm).control_constant;
  rep.c_out = holder_norm(y, prm).control_constant;
  rep.ratio = rep.c_out / std::max(rep.c_in, 1.0);
  rep.ok = std::isfinite(rep.c_out);
  return rep;
}

}  // namespace hrp
