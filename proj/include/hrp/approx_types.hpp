#pragma once

#include <cstddef>
#include <vector>

namespace hrp {

// Piecewise-linear path on the dyadic grid of depth `level`: 2^level + 1
// nodes, values flat row-major (node, coordinate).
struct DyadicPath {
  int level = 0;
  std::size_t d = 1;
  std::vector<double> values;

  std::size_t nodes() const { return (std::size_t{1} << level) + 1; }
  void validate() const;  // shape and finiteness

  // Linear interpolation onto the depth-K dyadic grid; requires K >= level.
  // Node values are reproduced exactly.
  std::vector<double> values_at_depth(int K) const;
};

}  // namespace hrp
