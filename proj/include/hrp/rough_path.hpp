#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hrp {

// Second-level convention carried by a grid rough path.
enum class Flavor { Stratonovich, Ito, SmoothLift };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);

// Exponents of the Hölder scale: p in (2,3), gamma in (0, 1/2 - 1/p),
// dyadic grid depth K (N = 2^K intervals).
struct HolderParams {
  double p = 2.5;
  double gamma = 0.05;
  int K = 12;

  void validate() const;  // throws std::invalid_argument on bad ranges
};

// One (X¹_{s,t}, X²_{s,t}) pair: increment in R^d plus a d×d tensor
// (row-major, entry (i,j) = ∫ (x^i - x^i_s) dx^j).
struct RoughIncrement {
  std::size_t dim = 0;
  std::vector<double> level1;
  std::vector<double> level2;

  static RoughIncrement zero(std::size_t d);
};

// Composition over adjoining intervals:
//   level1 = a.level1 + b.level1
//   level2 = a.level2 + b.level2 + a.level1 ⊗ b.level1
RoughIncrement chen_compose(const RoughIncrement& a, const RoughIncrement& b);

struct SymSplit {
  std::vector<double> sym;      // (M + Mᵀ)/2
  std::vector<double> antisym;  // (M - Mᵀ)/2
};
SymSplit sym_antisym(std::span<const double> m, std::size_t d);

// Level-2 rough path on a grid of [0,1]. Stores node values, one second-level
// tensor per adjacent interval, and running prefix tensors X²_{t_0, t_i} so
// that any increment is an O(1) query:
//
//   X¹_{t_i,t_j} = x_j - x_i
//   X²_{t_i,t_j} = prefix2[j] - prefix2[i] - (x_i - x_0) ⊗ (x_j - x_i)
//
// Immutable after construction; safe to share across threads.
class GridRoughPath {
 public:
  GridRoughPath() = default;

  // Builds prefix2 from adjacent data via the Chen relation.
  GridRoughPath(std::vector<double> times, std::size_t dim,
                std::vector<double> values, std::vector<double> adjacent2,
                Flavor flavor);

  // Trusts all arrays as given (no prefix rebuild, no consistency repair).
  static GridRoughPath from_raw_parts(std::vector<double> times,
                                      std::size_t dim,
                                      std::vector<double> values,
                                      std::vector<double> adjacent2,
                                      std::vector<double> prefix2,
                                      Flavor flavor);

  std::size_t dim() const { return dim_; }
  std::size_t intervals() const { return times_.empty() ? 0 : times_.size() - 1; }
  std::size_t nodes() const { return times_.size(); }
  Flavor flavor() const { return flavor_; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values_flat() const { return values_; }
  const std::vector<double>& adjacent2_flat() const { return adjacent2_; }
  const std::vector<double>& prefix2_flat() const { return prefix2_; }

  std::span<const double> value(std::size_t i) const;
  std::span<const double> adjacent2_at(std::size_t i) const;
  std::span<const double> prefix2_at(std::size_t i) const;

  RoughIncrement increment(std::size_t i, std::size_t j) const;

  // Allocation-free queries for the O(N²) kernels. out must have size d
  // resp. d².
  void level1_into(std::size_t i, std::size_t j, std::span<double> out) const;
  void level2_into(std::size_t i, std::size_t j, std::span<double> out) const;

  bool same_grid(const GridRoughPath& other) const;

  // 1 + (max absolute node coordinate)²; the scale that multiplies every
  // floating tolerance.
  double value_scale() const { return value_scale_; }

  // True iff N = 2^K and times[i] == i/2^K exactly; reports K.
  bool dyadic_depth(int& k_out) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> values_;     // (N+1) * d
  std::vector<double> adjacent2_;  // N * d²
  std::vector<double> prefix2_;    // (N+1) * d²
  Flavor flavor_ = Flavor::SmoothLift;
  double value_scale_ = 1.0;

  void check_shapes() const;
  void compute_scale();
};

struct ChenReport {
  double max_violation = 0.0;
  double scale = 1.0;
  bool pass = true;
};

// Samples `triples` index triples i <= j <= k and checks the composition law
// on queried increments; also checks the prefix/adjacent consistency of every
// interval (which is what an injected single-cell fault breaks). pass iff
// max_violation <= tol * scale.
ChenReport verify_chen(const GridRoughPath& x, std::size_t triples, double tol);

// Itô <-> Stratonovich: shifts each adjacent diagonal second-level entry by
// ±Δt/2 (Stratonovich = Itô + Δt/2 on the diagonal) and rebuilds prefixes.
// Off-diagonal entries are copied untouched. Throws on SmoothLift input.
GridRoughPath convert_flavor(const GridRoughPath& x, Flavor target);

// Path-level delay x(.) -> x((. - eps) ∨ 0). eps must be a whole number of
// grid steps on a uniform grid; anything else is rejected, never interpolated.
GridRoughPath tau_shift(const GridRoughPath& x, double eps);

}  // namespace hrp
