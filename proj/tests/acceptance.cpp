// Acceptance suite: one pass/fail line per criterion. Run with no arguments
// for the full battery or with a criterion number to run just that one
// (the ctest entries do the latter).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "hrp/approx.hpp"
#include "hrp/experiments.hpp"
#include "hrp/metrics.hpp"
#include "hrp/rde.hpp"
#include "hrp/sampler.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hrp;
using testutil::dyadic_times;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Chen suite: 100 random paths pass verify_chen at 1e-10*scale and every
//    injected single-cell fault is detected.
Outcome criterion1() {
  RngStream meta(1001, 0);
  int checked = 0, faults_caught = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 4 + static_cast<int>(meta.uniform_index(7));  // K in [4,10]
    const std::size_t d = 1 + meta.uniform_index(3);
    GridRoughPath path;
    if (trial % 2 == 0) {
      EbmConfig cfg;
      cfg.K = k;
      cfg.d = d;
      cfg.method = trial % 4 == 0 ? LevyMethod::BridgeSubdivision
                                  : LevyMethod::TruncatedSeries;
      RngStream rng(2000 + trial, 0);
      path = sample_ebm(cfg, rng);
    } else {
      RngStream rng(3000 + trial, 0);
      const std::size_t n = std::size_t{1} << k;
      path = pl_lift(dyadic_times(k), d,
                     testutil::random_walk_values(rng, n, d));
    }
    const ChenReport rep = verify_chen(path, 400, 1e-10);
    if (!rep.pass) return {false, "fresh path failed chen"};
    worst_rel = std::max(worst_rel, rep.max_violation / rep.scale);
    ++checked;

    auto adj = path.adjacent2_flat();
    const std::size_t cell = meta.uniform_index(adj.size());
    adj[cell] += 1.0;
    const GridRoughPath bad = GridRoughPath::from_raw_parts(
        path.times(), d, path.values_flat(), adj, path.prefix2_flat(),
        path.flavor());
    if (!verify_chen(bad, 400, 1e-10).pass) ++faults_caught;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d paths, worst violation %.2e*scale, %d/100 faults caught",
                checked, worst_rel, faults_caught);
  return {checked == 100 && faults_caught == 100, buf};
}

// 2. Geometric identity on pl_lift outputs, 1000 random pairs at 1e-12*scale.
Outcome criterion2() {
  RngStream rng(1002, 0);
  double worst = 0.0;
  int pairs_checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 4 + trial % 7;
    const std::size_t d = 1 + trial % 3;
    const std::size_t n = std::size_t{1} << k;
    const GridRoughPath x =
        pl_lift(dyadic_times(k), d, testutil::random_walk_values(rng, n, d));
    const double scale = x.value_scale();
    for (int q = 0; q < 100; ++q) {
      std::size_t i = rng.uniform_index(n + 1), j = rng.uniform_index(n + 1);
      if (i == j) j = (i + 1) % (n + 1);
      if (i > j) std::swap(i, j);
      const RoughIncrement inc = x.increment(i, j);
      const SymSplit split = sym_antisym(inc.level2, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          const double dev = std::abs(split.sym[r * d + c] -
                                      0.5 * inc.level1[r] * inc.level1[c]) /
                             scale;
          worst = std::max(worst, dev);
        }
      ++pairs_checked;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d pairs, worst sym defect %.2e*scale",
                pairs_checked, worst);
  return {pairs_checked == 1000 && worst <= 1e-12, buf};
}

// 3. Itô/Stratonovich conversion: diagonal shift exactly Δt/2, off-diagonal
//    untouched, involution exact (machine tolerance at scale).
Outcome criterion3() {
  for (const std::size_t d : {1u, 2u, 3u}) {
    EbmConfig cfg;
    cfg.K = 8;
    cfg.d = d;
    RngStream rng(1003 + d, 0);
    const GridRoughPath strat = sample_ebm(cfg, rng);
    const GridRoughPath ito = convert_flavor(strat, Flavor::Ito);
    const GridRoughPath back = convert_flavor(ito, Flavor::Stratonovich);
    const double scale = strat.value_scale();
    const double dt = std::ldexp(1.0, -8);
    for (std::size_t i = 0; i < strat.intervals(); ++i) {
      const auto a = strat.adjacent2_at(i);
      const auto b = ito.adjacent2_at(i);
      const auto c = back.adjacent2_at(i);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t cc = 0; cc < d; ++cc) {
          const double da = a[r * d + cc] - b[r * d + cc];
          if (r == cc) {
            if (std::abs(da - 0.5 * dt) > 1e-15 * scale)
              return {false, "diagonal shift is not dt/2"};
          } else {
            if (da != 0.0) return {false, "off-diagonal changed"};
          }
          if (std::abs(c[r * d + cc] - a[r * d + cc]) > 1e-15 * scale)
            return {false, "involution not exact"};
        }
    }
    if (back.values_flat() != strat.values_flat())
      return {false, "values changed"};
  }
  return {true, "diagonal +dt/2, off-diagonal bitwise, involution at 1e-15*scale"};
}

// 4. Metric oracles: DP p-variation equals exhaustive enumeration on >= 200
//    random instances (N <= 12), Hölder scan equals the naive O(N²) oracle
//    bit for bit.
Outcome criterion4() {
  RngStream rng(1004, 0);
  HolderParams prm;
  int enum_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(11);
    const std::size_t d = 1 + rng.uniform_index(2);
    std::vector<double> times = trial % 3 == 1
                                    ? dyadic_times(3)
                                    : testutil::random_times(rng, n);
    const GridRoughPath a = testutil::random_rough(rng, times, d);
    const GridRoughPath b = testutil::random_rough(rng, times, d);
    const double dp = pvar_dist(a, b, prm);
    const double ds = pvar_dist_serial(a, b, prm);
    const double de = oracle::pvar_enum(a, b, prm.p);
    if (dp == ds && dp == de) ++enum_ok;
  }

  EbmConfig cfg;
  cfg.K = 10;
  cfg.d = 2;
  prm.K = 10;
  RngStream srng(1044, 0);
  const GridRoughPath beta = sample_ebm(cfg, srng);
  const NormReport kernel = holder_norm(beta, prm);
  const NormReport serial = holder_norm_serial(beta, prm);
  const NormReport naive = oracle::naive_holder(beta, nullptr, prm.p);
  const bool holder_ok =
      kernel.value == naive.value && kernel.value == serial.value &&
      kernel.per_level[0] == naive.per_level[0] &&
      kernel.per_level[1] == naive.per_level[1] &&
      kernel.arg_s == naive.arg_s && kernel.arg_t == naive.arg_t &&
      kernel.control_constant == naive.control_constant;

  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "pvar enum %d/200 exact, holder vs naive %s", enum_ok,
                holder_ok ? "bit-identical" : "MISMATCH");
  return {enum_ok == 200 && holder_ok, buf};
}

// 5. Lemma 2.1 exponent band and the disjoint closed form.
Outcome criterion5() {
  const ExperimentConfig cfg = default_config("lemma21");
  const ExperimentReport rep = exp_lemma21(cfg);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "slope %.3f (target 0.4, band ±%.1f), worst disjoint z %.2f",
                rep.summary["slope"].get<double>(), cfg.slope_band,
                rep.summary["worst_disjoint_z"].get<double>());
  return {rep.pass, buf};
}

// 6. Wong-Zakai decrease of mean rho over the seed panel.
Outcome criterion6() {
  const ExperimentConfig cfg = default_config("wong_zakai");
  const ExperimentReport rep = exp_wong_zakai(cfg);
  char buf[120];
  std::snprintf(buf, sizeof(buf), "decrease fraction %.3f (need >= %.2f), log2 slope %.3f",
                rep.summary["decrease_fraction"].get<double>(),
                cfg.monotone_fraction, rep.summary["log2_slope"].get<double>());
  return {rep.pass, buf};
}

// 7. Adapted approximation decrease, plus the shift cost alone.
Outcome criterion7() {
  const ExperimentConfig cfg = default_config("adapted");
  const ExperimentReport rep = exp_adapted(cfg);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "decrease fraction %.3f, shift-cost fraction %.3f (need >= %.2f)",
                rep.summary["decrease_fraction"].get<double>(),
                rep.summary["shift_decrease_fraction"].get<double>(),
                cfg.monotone_fraction);
  return {rep.pass, buf};
}

// 8. Support evidence: outer statistic decreasing, positive mass in the
//    rho-ball of radius 0.5 at n = 10.
Outcome criterion8() {
  const ExperimentConfig cfg = default_config("support");
  const ExperimentReport rep = exp_support(cfg);
  char buf[200];
  std::snprintf(
      buf, sizeof(buf),
      "outer decrease fraction %.3f, fraction within rho < %.2f at n=%d: %.2f",
      rep.summary["outer_decrease_fraction"].get<double>(), cfg.support_delta,
      cfg.sizes.back(), rep.summary["fraction_within_support_delta"].get<double>());
  return {rep.pass, buf};
}

// 9. Martingale identity across cells; diagonal fails upward.
Outcome criterion9() {
  const ExperimentConfig cfg = default_config("martingale");
  const ExperimentReport rep = exp_martingale(cfg);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "off-diagonal pass fraction %.3f (need >= %.2f), diag z %.1f",
                rep.summary["offdiag_pass_fraction"].get<double>(),
                cfg.cell_pass_fraction, rep.summary["diag_z"].get<double>());
  return {rep.pass, buf};
}

// 10. RDE oracles: additive exactness and the exponential benchmark with
//     second-order refinement.
Outcome criterion10() {
  EbmConfig cfg;
  cfg.K = 10;
  cfg.d = 2;
  RngStream rng(1010, 0);
  const GridRoughPath x = sample_ebm(cfg, rng);
  const std::vector<double> c = {0.6, -0.2, 0.1, 1.3};
  const VectorFieldSpec f = make_constant_field(2, 2, c);
  const SolutionPath y = solve(x, f, std::vector<double>{1.0, -1.0});
  double worst = 0.0;
  for (std::size_t i = 0; i <= x.intervals(); ++i)
    for (std::size_t a = 0; a < 2; ++a) {
      double want = (a == 0 ? 1.0 : -1.0);
      for (std::size_t cc = 0; cc < 2; ++cc)
        want += c[a * 2 + cc] * (x.value(i)[cc] - x.value(0)[cc]);
      worst = std::max(worst, std::abs(y.value(i)[a] - want));
    }
  const bool additive_ok = worst <= 1e-11 * x.value_scale();

  auto terminal_error = [](int k) {
    const std::size_t n = std::size_t{1} << k;
    auto times = dyadic_times(k);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      vals[i] = std::sin(2.0 * 3.14159265358979323846 * times[i]);
    const GridRoughPath drv = pl_lift(std::move(times), 1, std::move(vals));
    const SolutionPath sol =
        solve(drv, make_linear_scalar_field(), std::vector<double>{1.0});
    const double exact = std::exp(drv.value(n)[0] - drv.value(0)[0]);
    return std::abs(sol.values.back() - exact);
  };
  const double e8 = terminal_error(8), e9 = terminal_error(9),
               e10 = terminal_error(10);
  const bool exp_ok = e10 <= 1e-3 && e8 / e9 >= 1.8 && e9 / e10 >= 1.8;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "additive defect %.2e*scale, exp error %.2e, ratios %.2f/%.2f",
                worst / x.value_scale(), e10, e8 / e9, e9 / e10);
  return {additive_ok && exp_ok, buf};
}

// 11. Lipschitz stability of the Itô-map across perturbation sizes.
Outcome criterion11() {
  const ExperimentConfig cfg = default_config("lipschitz");
  const ExperimentReport rep = exp_lipschitz(cfg);
  char buf[120];
  std::snprintf(buf, sizeof(buf), "stability %.2f (need <= %.1f)",
                rep.summary["stability"].get<double>(), cfg.stability_max);
  return {rep.pass, buf};
}

// 12. Appendix lemma scan across alphas with the 0.5 spot values.
Outcome criterion12() {
  const ExperimentConfig cfg = default_config("appendix_lemma");
  const ExperimentReport rep = exp_appendix_lemma(cfg);
  const bool spot_ok =
      std::abs(rep.summary["alpha_half_g0"].get<double>() - 0.5) <= 1e-12 &&
      std::abs(rep.summary["alpha_half_tail"].get<double>() - 1.0) <= 1e-3;
  std::string detail = "per-alpha:";
  for (const auto& entry : rep.summary["per_alpha"]) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), " a=%.1f %s(tail %.1e)",
                  entry["alpha"].get<double>(),
                  entry["pass"].get<bool>() ? "ok" : "FAIL",
                  entry["tail_flat"].get<double>());
    detail += buf;
  }
  return {rep.pass && spot_ok, detail};
}

// 13. Reproducibility: identical configs give byte-identical CSV.
Outcome criterion13() {
  ExperimentConfig wz = default_config("wong_zakai");
  wz.prm.K = 9;
  wz.seeds = {1, 2, 3, 4, 5};
  wz.sizes = {2, 3, 4, 5, 6};
  const std::string a = exp_wong_zakai(wz).csv_string();
  const std::string b = exp_wong_zakai(wz).csv_string();

  ExperimentConfig mart = default_config("martingale");
  mart.prm.K = 6;
  mart.mart_level = 2;
  mart.resamples = 500;
  const std::string c = exp_martingale(mart).csv_string();
  const std::string d = exp_martingale(mart).csv_string();

  ExperimentConfig lip = default_config("lipschitz");
  lip.prm.K = 8;
  lip.seeds = {1, 2, 3};
  const std::string e = exp_lipschitz(lip).csv_string();
  const std::string f = exp_lipschitz(lip).csv_string();

  const bool ok = a == b && c == d && e == f;
  return {ok, ok ? "three experiments re-ran byte-identical" : "CSV drift"};
}

}  // namespace

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  using Fn = Outcome (*)();
  const Fn criteria[] = {criterion1, criterion2, criterion3,  criterion4,
                         criterion5, criterion6, criterion7,  criterion8,
                         criterion9, criterion10, criterion11, criterion12,
                         criterion13};
  const char* names[] = {
      "chen relation + fault detection",
      "geometric symmetry of lifts",
      "ito/stratonovich conversion",
      "metric kernels vs oracles",
      "lemma 2.1 moment exponent",
      "wong-zakai convergence",
      "adapted approximation convergence",
      "support theorem evidence",
      "martingale identity",
      "rde solver oracles",
      "ito-map lipschitz stability",
      "appendix lemma scan",
      "reproducibility",
  };
  int failures = 0;
  for (int i = 1; i <= 13; ++i) {
    if (only != 0 && only != i) continue;
    const Outcome out = criteria[i - 1]();
    std::printf("[%s] criterion %2d: %s — %s\n", out.pass ? "PASS" : "FAIL", i,
                names[i - 1], out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
