#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hrp/approx.hpp"
#include "hrp/experiments.hpp"
#include "hrp/metrics.hpp"
#include "hrp/sampler.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hrp;
using testutil::dyadic_times;

namespace {

GridRoughPath zero_path(int k, std::size_t d) {
  const std::size_t n = std::size_t{1} << k;
  return pl_lift(dyadic_times(k), d, std::vector<double>((n + 1) * d, 0.0));
}

}  // namespace

TEST_CASE("pl_lift closed forms and geometric symmetry") {
  // linear path
  auto times = dyadic_times(4);
  std::vector<double> vals(17);
  for (std::size_t i = 0; i <= 16; ++i) vals[i] = times[i] * 0.9;
  const GridRoughPath lin = pl_lift(times, 1, vals);
  CHECK(lin.flavor() == Flavor::SmoothLift);
  CHECK(lin.increment(0, 16).level2[0] ==
        doctest::Approx(0.5 * 0.81).epsilon(1e-12));

  // random piecewise-linear lifts satisfy Sym(X²) = (1/2) X¹ ⊗ X¹
  RngStream rng(301, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const int k = 4 + trial % 4;
    const std::size_t n = std::size_t{1} << k;
    const GridRoughPath x =
        pl_lift(dyadic_times(k), d, testutil::random_walk_values(rng, n, d));
    const double scale = x.value_scale();
    for (int pair = 0; pair < 100; ++pair) {
      std::size_t i = rng.uniform_index(n + 1), j = rng.uniform_index(n + 1);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      const RoughIncrement inc = x.increment(i, j);
      const SymSplit split = sym_antisym(inc.level2, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
          CHECK(std::abs(split.sym[r * d + c] -
                         0.5 * inc.level1[r] * inc.level1[c]) <=
                1e-12 * scale);
    }
  }
}

TEST_CASE("pl_lift of the L-path reproduces the frozen oracle value") {
  const std::vector<double> times = {0.0, 0.5, 1.0};
  const std::vector<double> values = {0.0, 0.0, 1.0, 0.0, 1.0, 1.0};
  const GridRoughPath x = pl_lift(times, 2, values);
  const RoughIncrement full = x.increment(0, 2);
  CHECK(full.level2 == std::vector<double>{0.5, 1.0, 0.0, 0.5});
}

TEST_CASE("coarsen: idempotence at n = K, chord at n = 0, nesting") {
  RngStream rng(303, 0);
  const int k = 7;
  const std::size_t n = std::size_t{1} << k;
  const GridRoughPath x =
      pl_lift(dyadic_times(k), 2, testutil::random_walk_values(rng, n, 2));

  const GridRoughPath same = coarsen(x, k);
  CHECK(same.values_flat() == x.values_flat());
  CHECK(same.adjacent2_flat() == x.adjacent2_flat());

  const GridRoughPath chord = coarsen(x, 0);
  for (std::size_t c = 0; c < 2; ++c) {
    const double slope = x.value(n)[c] - x.value(0)[c];
    for (std::size_t i = 0; i <= n; ++i)
      CHECK(chord.value(i)[c] ==
            doctest::Approx(x.value(0)[c] + x.times()[i] * slope)
                .epsilon(1e-14));
  }

  const GridRoughPath ab = coarsen(coarsen(x, 5), 3);
  const GridRoughPath direct = coarsen(x, 3);
  CHECK(ab.values_flat() == direct.values_flat());
  CHECK(ab.adjacent2_flat() == direct.adjacent2_flat());

  CHECK_THROWS_AS(coarsen(x, 8), std::invalid_argument);
  RngStream rng2(304, 0);
  const GridRoughPath irr =
      testutil::random_rough(rng2, testutil::random_times(rng2, 8), 1);
  CHECK_THROWS_AS(coarsen(irr, 2), std::invalid_argument);
}

TEST_CASE("adapted_approx: shift floor and reindexing identity") {
  EbmConfig cfg;
  cfg.K = 8;
  cfg.d = 2;
  RngStream rng(305, 0);
  const GridRoughPath beta = sample_ebm(cfg, rng);
  const int n = 3;
  const GridRoughPath ad = adapted_approx(beta, n);
  const GridRoughPath cz = coarsen(beta, n);
  const std::size_t m = std::size_t{1} << (8 - n);

  for (std::size_t i = 0; i < m; ++i) {
    const RoughIncrement inc = ad.increment(i, i + 1);
    for (double v : inc.level1) CHECK(v == 0.0);
    for (double v : inc.level2) CHECK(v == 0.0);
  }
  const RoughIncrement tail = ad.increment(m, beta.intervals());
  const RoughIncrement ref = cz.increment(0, beta.intervals() - m);
  CHECK(tail.level1 == ref.level1);
  CHECK(tail.level2 == ref.level2);
}

TEST_CASE("cross_young: constants, linear exactness, quadratic convergence") {
  const std::size_t n = 32;
  std::vector<double> a(n + 1), b(n + 1), c(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    a[i] = 4.2;
    b[i] = t;
    c[i] = t * t;
  }
  CHECK(cross_young(a, b) == 0.0);
  CHECK(cross_young(b, b) == doctest::Approx(0.5).epsilon(1e-14));

  const std::size_t nf = 1024;
  std::vector<double> tf(nf + 1), t2f(nf + 1);
  for (std::size_t i = 0; i <= nf; ++i) {
    const double t = static_cast<double>(i) / nf;
    tf[i] = t;
    t2f[i] = t * t;
  }
  CHECK(cross_young(tf, t2f) == doctest::Approx(2.0 / 3.0).epsilon(1.5e-3));

  CHECK_THROWS_AS(cross_young(a, tf), std::invalid_argument);
}

TEST_CASE("translate: neutral element, zero base, group property, chen") {
  EbmConfig cfg;
  cfg.K = 6;
  cfg.d = 2;
  RngStream rng(307, 0);
  const GridRoughPath x = sample_ebm(cfg, rng);

  DyadicPath zero_h;
  zero_h.level = 2;
  zero_h.d = 2;
  zero_h.values.assign(zero_h.nodes() * 2, 0.0);
  const GridRoughPath same = translate(x, zero_h);
  CHECK(same.values_flat() == x.values_flat());
  CHECK(same.adjacent2_flat() == x.adjacent2_flat());

  DyadicPath h;
  h.level = 3;
  h.d = 2;
  h.values.resize(h.nodes() * 2);
  RngStream hr(308, 0);
  for (auto& v : h.values) v = 0.5 * hr.gaussian();

  const GridRoughPath lifted_h =
      pl_lift(dyadic_times(6), 2, h.values_at_depth(6));
  const GridRoughPath from_zero = translate(zero_path(6, 2), h);
  CHECK(from_zero.values_flat() == lifted_h.values_flat());
  CHECK(from_zero.adjacent2_flat() == lifted_h.adjacent2_flat());

  DyadicPath neg = h;
  for (auto& v : neg.values) v = -v;
  const GridRoughPath round = translate(translate(x, h), neg);
  const double scale = x.value_scale();
  CHECK(testutil::max_abs_diff(round.values_flat(), x.values_flat()) <=
        1e-10 * scale);
  CHECK(testutil::max_abs_diff(round.adjacent2_flat(), x.adjacent2_flat()) <=
        1e-10 * scale);

  const GridRoughPath shifted = translate(x, h);
  CHECK(verify_chen(shifted, 300, 1e-10).pass);
  // level-1 increments move exactly by h's increments
  const std::vector<double> hf = h.values_at_depth(6);
  for (std::size_t q = 0; q < hf.size(); ++q)
    CHECK(std::abs((shifted.values_flat()[q] - x.values_flat()[q]) - hf[q]) <=
          1e-15 * scale);

  DyadicPath toofine;
  toofine.level = 7;
  toofine.d = 2;
  toofine.values.assign(toofine.nodes() * 2, 0.0);
  CHECK_THROWS_AS(translate(x, toofine), std::invalid_argument);
}

TEST_CASE("girsanov_path: definition, h = 0 reduction, chen") {
  EbmConfig cfg;
  cfg.K = 7;
  cfg.d = 2;
  RngStream rng(309, 0);
  const GridRoughPath beta = sample_ebm(cfg, rng);

  DyadicPath h;
  h.level = 3;
  h.d = 2;
  h.values.resize(h.nodes() * 2);
  RngStream hr(310, 0);
  for (auto& v : h.values) v = 0.3 * hr.gaussian();

  for (int n : {3, 5, 7}) {
    const GridRoughPath t_path = girsanov_path(beta, h, n);
    CHECK(verify_chen(t_path, 300, 1e-10).pass);
    const GridRoughPath ad = adapted_approx(beta, n);
    const std::vector<double> hf = h.values_at_depth(7);
    const double scale = beta.value_scale();
    for (std::size_t q = 0; q < hf.size(); ++q) {
      const double want =
          beta.values_flat()[q] - ad.values_flat()[q] + hf[q];
      CHECK(std::abs(t_path.values_flat()[q] - want) <= 1e-12 * scale);
    }
  }

  DyadicPath zero_h;
  zero_h.level = 0;
  zero_h.d = 2;
  zero_h.values.assign(2 * 2, 0.0);
  const GridRoughPath residual = girsanov_path(beta, zero_h, 4);
  const GridRoughPath ad4 = adapted_approx(beta, 4);
  for (std::size_t q = 0; q < residual.values_flat().size(); ++q)
    CHECK(residual.values_flat()[q] ==
          doctest::Approx(beta.values_flat()[q] - ad4.values_flat()[q])
              .epsilon(1e-12));
}

TEST_CASE("bridge resampling conditional mean reproduces the coarse lift") {
  // E[Z(K) | F_n] = Z(n) for the off-diagonal component of nested dyadic
  // lifts: the resampled fine mean must approach the coarse value.
  const int K = 6, n = 2;
  const std::size_t d = 2;
  RngStream crng(311, 0);
  const std::vector<double> coarse = sample_bm(n, d, crng);
  DyadicPath cp{n, d, coarse};
  const GridRoughPath coarse_lift =
      pl_lift(dyadic_times(K), d, cp.values_at_depth(K));

  const std::size_t s_idx = 8, t_idx = 48;  // interior, non-node endpoints
  const int B = 3000;
  std::vector<double> fine_vals;
  const double e2 = 2.0 / 2.5;
  for (int b = 0; b < B; ++b) {
    RngStream rng(311, static_cast<std::uint64_t>(b + 1));
    std::vector<double> vals = coarse;
    double mesh = std::ldexp(1.0, -n);
    for (int lev = n; lev < K; ++lev) {
      vals = bridge_refine(vals, d, mesh, rng);
      mesh *= 0.5;
    }
    const GridRoughPath lift = pl_lift(dyadic_times(K), d, vals);
    std::vector<double> l2(d * d);
    lift.level2_into(s_idx, t_idx, l2);
    const double dt = lift.times()[t_idx] - lift.times()[s_idx];
    fine_vals.push_back(l2[1] / std::pow(dt, e2));
  }
  std::vector<double> l2(d * d);
  coarse_lift.level2_into(s_idx, t_idx, l2);
  const double dt = coarse_lift.times()[t_idx] - coarse_lift.times()[s_idx];
  const double coarse_val = l2[1] / std::pow(dt, e2);
  const double mean = compensated_mean(fine_vals);
  const double se = sample_std_err(fine_vals);
  CHECK(std::abs(mean - coarse_val) <= 4.0 * se);
}
