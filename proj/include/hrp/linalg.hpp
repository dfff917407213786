#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace hrp {

// Euclidean norm, accumulated in index order.
inline double vec_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Frobenius norm of a flat row-major tensor (same accumulation order).
inline double frob_norm(std::span<const double> m) { return vec_norm(m); }

inline double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v)
    if (std::abs(x) > s) s = std::abs(x);
  return s;
}

// out += w * (a ⊗ b), row-major d×d
inline void outer_accum(std::span<const double> a, std::span<const double> b,
                        double w, std::span<double> out) {
  const std::size_t d = a.size();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out[r * d + c] += w * a[r] * b[c];
}

}  // namespace hrp
