#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hrp/approx_types.hpp"
#include "hrp/rough_path.hpp"
#include "hrp/sampler.hpp"

namespace hrp {

// Flat key=value configuration for the experiment harness. Every threshold
// that decides a pass flag lives here and is echoed into the JSON summary.
struct ExperimentConfig {
  std::string name;

  HolderParams prm;  // p, gamma, K
  std::size_t d = 2;
  std::vector<std::uint64_t> seeds = {1, 2,  3,  4,  5,  6,  7,  8,  9,  10,
                                      11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  std::vector<int> sizes;  // n-levels (or the 2^-k ladder for lemma21)

  LevyMethod method = LevyMethod::BridgeSubdivision;
  int m = 4;
  int terms = 32;
  Flavor flavor = Flavor::Stratonovich;

  std::string out_csv;
  std::string out_json;

  // support experiment
  std::string h_file;
  int h_level = 3;
  double h_scale = 1.0;
  std::vector<double> deltas = {0.25, 0.5, 1.0, 2.0};

  // lemma21 / martingale
  int samples = 10000;
  int resamples = 4000;
  int mart_level = 3;

  // lipschitz
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3};
  std::string field = "linear-scalar";
  int bump_level = 5;
  std::vector<double> y0 = {1.0};

  // appendix lemma
  std::vector<double> alphas = {0.3, 0.5, 0.7, 0.8};

  // pre-registered thresholds
  double monotone_fraction = 0.9;
  double slope_band = 0.2;
  double stderr_mult = 4.0;
  double cell_pass_fraction = 0.95;
  double stability_max = 10.0;
  double tail_flat_tol = 1e-3;
  double support_delta = 0.5;

  void validate() const;
  nlohmann::ordered_json echo() const;
};

// Parses the flat text format (`key = value`, '#' comments). Unknown keys and
// missing required fields raise std::runtime_error naming the key. Defaults
// depend on the experiment name (applied before overrides).
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig default_config(const std::string& name);

struct ExperimentReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json summary;
  bool pass = false;

  std::string csv_string() const;
  // Writes CSV/JSON to the paths in the config (skipping empty paths).
  void write(const ExperimentConfig& cfg) const;
};

ExperimentReport exp_wong_zakai(const ExperimentConfig& cfg);
ExperimentReport exp_adapted(const ExperimentConfig& cfg);
ExperimentReport exp_support(const ExperimentConfig& cfg);
ExperimentReport exp_lemma21(const ExperimentConfig& cfg);
ExperimentReport exp_martingale(const ExperimentConfig& cfg);
ExperimentReport exp_lipschitz(const ExperimentConfig& cfg);
ExperimentReport exp_appendix_lemma(const ExperimentConfig& cfg);

// Dispatch by cfg.name; writes outputs, returns the report.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Built-in Cameron-Martin direction used when no h_file is given:
// h^c(t) = h_scale * s_c(t) with s_0 = t, s_1 = 4t(1-t), s_c = t^c for c >= 2,
// sampled at the dyadic nodes of h_level.
DyadicPath default_support_direction(int level, std::size_t d, double scale);

// Ordered, compensated reduction helpers shared by the harness.
double compensated_mean(const std::vector<double>& xs);
double sample_std_err(const std::vector<double>& xs);
// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace hrp
