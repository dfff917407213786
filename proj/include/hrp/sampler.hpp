#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hrp/rng.hpp"
#include "hrp/rough_path.hpp"

namespace hrp {

enum class LevyMethod { BridgeSubdivision, TruncatedSeries };

// How to sample enhanced Brownian motion on the depth-K dyadic grid.
struct EbmConfig {
  int K = 12;
  std::size_t d = 2;
  LevyMethod method = LevyMethod::BridgeSubdivision;
  int m = 4;        // extra bridge levels per interval (BridgeSubdivision)
  int terms = 32;   // series truncation (TruncatedSeries)
  Flavor flavor = Flavor::Stratonovich;

  void validate() const;
};

// Brownian values on the depth-K grid: values[0] = 0, increments i.i.d.
// N(0, 2^-K I). Flat (N+1) x d, drawn node by node, coordinate by coordinate.
std::vector<double> sample_bm(int K, std::size_t d, RngStream& rng);

// One Brownian-bridge refinement step: doubles the grid, endpoints preserved
// bit-exactly, midpoints drawn interval by interval with variance mesh/4 per
// coordinate. `mesh` is the input spacing.
std::vector<double> bridge_refine(const std::vector<double>& values,
                                  std::size_t d, double mesh, RngStream& rng);

// Stratonovich second-level tensors per adjacent interval, from an m-level
// bridge refinement of each interval folded together by Chen (the
// piecewise-linear lift of the refined segment). m = 0 degenerates to
// (1/2) Δ ⊗ Δ.
std::vector<double> levy_area_bridge(const std::vector<double>& values,
                                     std::size_t d, double mesh, int m,
                                     RngStream& rng);

// Stratonovich second-level tensor for one interval from the truncated
// Fourier expansion of the bridge area conditional on the increment:
// (1/2) Δ ⊗ Δ plus an exactly antisymmetric sampled area. The law converges
// to the true conditional law as terms grows.
void levy_area_series(std::span<const double> increment, double dt, int terms,
                      RngStream& rng, std::span<double> out);

// Full enhanced Brownian motion sample.
GridRoughPath sample_ebm(const EbmConfig& cfg, RngStream& rng);

// Index quadruple (s, t, s', t') on the depth-K grid.
struct PairQuad {
  std::size_t s, t, s2, t2;
};

struct MomentEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

// Monte-Carlo estimate of E |Z²_{s,t} - Z²_{s',t'}|² for the off-diagonal
// (0,1) component of Z² = X² / |t-s|^{2/p}, over fresh EBM samples drawn with
// substreams of `seed`. Requires d >= 2 and samples >= 100.
std::vector<MomentEstimate> moment_probe(const EbmConfig& cfg, double p,
                                         const std::vector<PairQuad>& pairs,
                                         int samples, std::uint64_t seed);

}  // namespace hrp
