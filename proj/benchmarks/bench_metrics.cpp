// Timing harness comparing the OpenMP kernels against the serial references
// on sampled enhanced Brownian motion.

#include <chrono>
#include <cstdio>

#include "hrp/metrics.hpp"
#include "hrp/approx.hpp"
#include "hrp/sampler.hpp"

using clk = std::chrono::steady_clock;

static double time_ms(const auto& fn) {
  const auto t0 = clk::now();
  fn();
  const auto t1 = clk::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

int main() {
  hrp::HolderParams prm;
  std::printf("%-26s %6s %4s %12s %12s %8s\n", "kernel", "K", "d",
              "serial (ms)", "openmp (ms)", "speedup");
  for (int K : {10, 11, 12}) {
    hrp::EbmConfig cfg;
    cfg.K = K;
    cfg.d = 2;
    prm.K = K;
    hrp::RngStream rng(42, 0);
    const hrp::GridRoughPath beta = hrp::sample_ebm(cfg, rng);
    const hrp::GridRoughPath approx = hrp::coarsen(beta, K / 2);

    hrp::NormReport a, b;
    const double ts = time_ms([&] { a = hrp::holder_norm_serial(beta, prm); });
    const double tp = time_ms([&] { b = hrp::holder_norm(beta, prm); });
    std::printf("%-26s %6d %4zu %12.1f %12.1f %7.2fx%s\n", "holder_norm", K,
                cfg.d, ts, tp, ts / tp,
                a.value == b.value ? "" : "  MISMATCH");

    double ra = 0, rb = 0;
    const double rs =
        time_ms([&] { ra = hrp::rho_report_serial(approx, beta, prm).value; });
    const double rp =
        time_ms([&] { rb = hrp::rho_report(approx, beta, prm).value; });
    std::printf("%-26s %6d %4zu %12.1f %12.1f %7.2fx%s\n", "rho", K, cfg.d, rs,
                rp, rs / rp, ra == rb ? "" : "  MISMATCH");
  }
  {
    // p-variation DP at moderate N (quadratic with a pow per candidate).
    hrp::EbmConfig cfg;
    cfg.K = 9;
    cfg.d = 2;
    prm.K = cfg.K;
    hrp::RngStream rng(43, 0);
    const hrp::GridRoughPath beta = hrp::sample_ebm(cfg, rng);
    const hrp::GridRoughPath approx = hrp::coarsen(beta, 4);
    double a = 0, b = 0;
    const double ts = time_ms([&] { a = hrp::pvar_dist_serial(approx, beta, prm); });
    const double tp = time_ms([&] { b = hrp::pvar_dist(approx, beta, prm); });
    std::printf("%-26s %6d %4zu %12.1f %12.1f %7.2fx%s\n", "pvar_dist", cfg.K,
                cfg.d, ts, tp, ts / tp, a == b ? "" : "  MISMATCH");
  }
  return 0;
}
