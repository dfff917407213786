#include "hrp/rough_path.hpp"

#include <cmath>
#include <stdexcept>

#include "hrp/linalg.hpp"
#include "hrp/rng.hpp"

namespace hrp {

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::Stratonovich: return "stratonovich";
    case Flavor::Ito: return "ito";
    case Flavor::SmoothLift: return "smooth_lift";
  }
  return "?";
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "stratonovich") return Flavor::Stratonovich;
  if (s == "ito") return Flavor::Ito;
  if (s == "smooth_lift") return Flavor::SmoothLift;
  throw std::invalid_argument("unknown flavor: " + s);
}

void HolderParams::validate() const {
  if (!(p > 2.0 && p < 3.0))
    throw std::invalid_argument("HolderParams: p must lie in (2,3)");
  if (!(gamma > 0.0 && gamma < 0.5 - 1.0 / p))
    throw std::invalid_argument("HolderParams: gamma must lie in (0, 1/2 - 1/p)");
  if (K < 0) throw std::invalid_argument("HolderParams: K must be >= 0");
}

RoughIncrement RoughIncrement::zero(std::size_t d) {
  RoughIncrement r;
  r.dim = d;
  r.level1.assign(d, 0.0);
  r.level2.assign(d * d, 0.0);
  return r;
}

RoughIncrement chen_compose(const RoughIncrement& a, const RoughIncrement& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("chen_compose: dimension mismatch");
  const std::size_t d = a.dim;
  RoughIncrement out = RoughIncrement::zero(d);
  for (std::size_t c = 0; c < d; ++c) out.level1[c] = a.level1[c] + b.level1[c];
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out.level2[r * d + c] =
          a.level2[r * d + c] + b.level2[r * d + c] + a.level1[r] * b.level1[c];
  return out;
}

SymSplit sym_antisym(std::span<const double> m, std::size_t d) {
  if (m.size() != d * d)
    throw std::invalid_argument("sym_antisym: tensor must be d*d");
  SymSplit out;
  out.sym.resize(d * d);
  out.antisym.resize(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      out.sym[r * d + c] = 0.5 * (m[r * d + c] + m[c * d + r]);
      out.antisym[r * d + c] = 0.5 * (m[r * d + c] - m[c * d + r]);
    }
  return out;
}

GridRoughPath::GridRoughPath(std::vector<double> times, std::size_t dim,
                             std::vector<double> values,
                             std::vector<double> adjacent2, Flavor flavor)
    : dim_(dim),
      times_(std::move(times)),
      values_(std::move(values)),
      adjacent2_(std::move(adjacent2)),
      flavor_(flavor) {
  check_shapes();
  const std::size_t n = intervals();
  const std::size_t dd = dim_ * dim_;
  prefix2_.assign((n + 1) * dd, 0.0);
  // prefix2[i+1] = prefix2[i] + adjacent2[i] + (x_i - x_0) ⊗ (x_{i+1} - x_i)
  for (std::size_t i = 0; i < n; ++i) {
    const double* prev = prefix2_.data() + i * dd;
    const double* adj = adjacent2_.data() + i * dd;
    double* next = prefix2_.data() + (i + 1) * dd;
    const double* v0 = values_.data();
    const double* vi = values_.data() + i * dim_;
    const double* vj = values_.data() + (i + 1) * dim_;
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        next[r * dim_ + c] = prev[r * dim_ + c] + adj[r * dim_ + c] +
                             (vi[r] - v0[r]) * (vj[c] - vi[c]);
  }
  compute_scale();
}

GridRoughPath GridRoughPath::from_raw_parts(std::vector<double> times,
                                            std::size_t dim,
                                            std::vector<double> values,
                                            std::vector<double> adjacent2,
                                            std::vector<double> prefix2,
                                            Flavor flavor) {
  GridRoughPath g;
  g.dim_ = dim;
  g.times_ = std::move(times);
  g.values_ = std::move(values);
  g.adjacent2_ = std::move(adjacent2);
  g.prefix2_ = std::move(prefix2);
  g.flavor_ = flavor;
  g.check_shapes();
  if (g.prefix2_.size() != g.nodes() * dim * dim)
    throw std::invalid_argument("GridRoughPath: prefix2 has wrong size");
  g.compute_scale();
  return g;
}

void GridRoughPath::check_shapes() const {
  if (dim_ == 0) throw std::invalid_argument("GridRoughPath: dim must be >= 1");
  if (times_.size() < 2)
    throw std::invalid_argument("GridRoughPath: need at least two grid nodes");
  if (times_.front() != 0.0 || times_.back() != 1.0)
    throw std::invalid_argument("GridRoughPath: times must span [0,1]");
  for (std::size_t i = 0; i + 1 < times_.size(); ++i)
    if (!(times_[i] < times_[i + 1]))
      throw std::invalid_argument("GridRoughPath: times must be strictly increasing");
  const std::size_t n = times_.size() - 1;
  if (values_.size() != (n + 1) * dim_)
    throw std::invalid_argument("GridRoughPath: values have wrong size");
  if (adjacent2_.size() != n * dim_ * dim_)
    throw std::invalid_argument("GridRoughPath: adjacent2 has wrong size");
  for (double v : values_)
    if (!std::isfinite(v))
      throw std::invalid_argument("GridRoughPath: non-finite value");
  for (double v : adjacent2_)
    if (!std::isfinite(v))
      throw std::invalid_argument("GridRoughPath: non-finite adjacent2 entry");
}

void GridRoughPath::compute_scale() {
  const double m = max_abs(values_);
  value_scale_ = 1.0 + m * m;
}

std::span<const double> GridRoughPath::value(std::size_t i) const {
  return {values_.data() + i * dim_, dim_};
}

std::span<const double> GridRoughPath::adjacent2_at(std::size_t i) const {
  return {adjacent2_.data() + i * dim_ * dim_, dim_ * dim_};
}

std::span<const double> GridRoughPath::prefix2_at(std::size_t i) const {
  return {prefix2_.data() + i * dim_ * dim_, dim_ * dim_};
}

RoughIncrement GridRoughPath::increment(std::size_t i, std::size_t j) const {
  if (i > j || j > intervals())
    throw std::out_of_range("GridRoughPath::increment: bad index pair");
  RoughIncrement out = RoughIncrement::zero(dim_);
  if (i == j) return out;
  level1_into(i, j, out.level1);
  level2_into(i, j, out.level2);
  return out;
}

void GridRoughPath::level1_into(std::size_t i, std::size_t j,
                                std::span<double> out) const {
  const double* vi = values_.data() + i * dim_;
  const double* vj = values_.data() + j * dim_;
  for (std::size_t c = 0; c < dim_; ++c) out[c] = vj[c] - vi[c];
}

void GridRoughPath::level2_into(std::size_t i, std::size_t j,
                                std::span<double> out) const {
  const std::size_t d = dim_;
  const double* pi = prefix2_.data() + i * d * d;
  const double* pj = prefix2_.data() + j * d * d;
  const double* v0 = values_.data();
  const double* vi = values_.data() + i * d;
  const double* vj = values_.data() + j * d;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out[r * d + c] = (pj[r * d + c] - pi[r * d + c]) -
                       (vi[r] - v0[r]) * (vj[c] - vi[c]);
}

bool GridRoughPath::same_grid(const GridRoughPath& other) const {
  return dim_ == other.dim_ && times_ == other.times_;
}

bool GridRoughPath::dyadic_depth(int& k_out) const {
  const std::size_t n = intervals();
  if (n == 0 || (n & (n - 1)) != 0) return false;
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  const double mesh = std::ldexp(1.0, -k);
  for (std::size_t i = 0; i < times_.size(); ++i)
    if (times_[i] != static_cast<double>(i) * mesh) return false;
  k_out = k;
  return true;
}

ChenReport verify_chen(const GridRoughPath& x, std::size_t triples,
                       double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("verify_chen: tol must be > 0");
  const std::size_t n = x.intervals();
  const std::size_t d = x.dim();
  const std::size_t dd = d * d;
  ChenReport rep;
  rep.scale = x.value_scale();

  double worst = 0.0;

  // Prefix/adjacent consistency on every interval: rebuilding one Chen step
  // must land exactly on the stored prefix.
  {
    std::vector<double> step(dd);
    for (std::size_t i = 0; i < n; ++i) {
      const auto prev = x.prefix2_at(i);
      const auto next = x.prefix2_at(i + 1);
      const auto adj = x.adjacent2_at(i);
      const auto v0 = x.value(0);
      const auto vi = x.value(i);
      const auto vj = x.value(i + 1);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          const double want = prev[r * d + c] + adj[r * d + c] +
                              (vi[r] - v0[r]) * (vj[c] - vi[c]);
          const double got = next[r * d + c];
          const double dev = std::abs(got - want);
          if (dev > worst) worst = dev;
        }
    }
  }

  // Sampled composition triples on queried increments.
  if (n >= 2 && triples > 0) {
    RngStream rng(0x9E3779B97F4A7C15ULL ^ n, 7);
    std::vector<double> a1(d), b1(d), full1(d);
    std::vector<double> a2(dd), b2(dd), full2(dd);
    for (std::size_t t = 0; t < triples; ++t) {
      std::size_t i = rng.uniform_index(n + 1);
      std::size_t j = rng.uniform_index(n + 1);
      std::size_t k = rng.uniform_index(n + 1);
      if (i > j) std::swap(i, j);
      if (j > k) std::swap(j, k);
      if (i > j) std::swap(i, j);
      x.level1_into(i, j, a1);
      x.level1_into(j, k, b1);
      x.level1_into(i, k, full1);
      x.level2_into(i, j, a2);
      x.level2_into(j, k, b2);
      x.level2_into(i, k, full2);
      for (std::size_t c = 0; c < d; ++c) {
        const double dev = std::abs(full1[c] - (a1[c] + b1[c]));
        if (dev > worst) worst = dev;
      }
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          const double dev = std::abs(full2[r * d + c] -
                                      (a2[r * d + c] + b2[r * d + c] +
                                       a1[r] * b1[c]));
          if (dev > worst) worst = dev;
        }
    }
  }

  rep.max_violation = worst;
  rep.pass = worst <= tol * rep.scale;
  return rep;
}

GridRoughPath convert_flavor(const GridRoughPath& x, Flavor target) {
  if (x.flavor() == Flavor::SmoothLift)
    throw std::invalid_argument("convert_flavor: smooth lifts have no Itô/Stratonovich conversion");
  if (target == Flavor::SmoothLift)
    throw std::invalid_argument("convert_flavor: cannot target smooth_lift");
  if (target == x.flavor()) return x;

  const std::size_t n = x.intervals();
  const std::size_t d = x.dim();
  // Stratonovich = Itô + Δt/2 on the diagonal of each adjacent tensor.
  const double sign = (target == Flavor::Stratonovich) ? 0.5 : -0.5;
  std::vector<double> adj = x.adjacent2_flat();
  for (std::size_t i = 0; i < n; ++i) {
    const double half_dt = sign * (x.times()[i + 1] - x.times()[i]);
    for (std::size_t c = 0; c < d; ++c) adj[i * d * d + c * d + c] += half_dt;
  }
  return GridRoughPath(x.times(), d, x.values_flat(), std::move(adj), target);
}

GridRoughPath tau_shift(const GridRoughPath& x, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("tau_shift: eps must be finite and >= 0");
  const std::size_t n = x.intervals();
  const double mesh = x.times()[1] - x.times()[0];
  for (std::size_t i = 0; i + 1 < x.times().size(); ++i)
    if (x.times()[i + 1] - x.times()[i] != mesh)
      throw std::invalid_argument("tau_shift: grid must be uniform");
  const double steps = eps / mesh;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9)
    throw std::invalid_argument("tau_shift: eps is not a whole number of grid steps");
  std::size_t m = static_cast<std::size_t>(rounded);
  if (m > n) m = n;

  const std::size_t d = x.dim();
  const std::size_t dd = d * d;
  std::vector<double> values((n + 1) * d);
  std::vector<double> adj(n * dd, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t src = i >= m ? i - m : 0;
    for (std::size_t c = 0; c < d; ++c) values[i * d + c] = x.value(src)[c];
  }
  for (std::size_t i = m; i < n; ++i) {
    const auto src = x.adjacent2_at(i - m);
    for (std::size_t c = 0; c < dd; ++c) adj[i * dd + c] = src[c];
  }
  return GridRoughPath(x.times(), d, std::move(values), std::move(adj),
                       x.flavor());
}

}  // namespace hrp
