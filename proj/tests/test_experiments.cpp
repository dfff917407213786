#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hrp/experiments.hpp"

using namespace hrp;

namespace {

ExperimentConfig small_wz() {
  ExperimentConfig cfg = default_config("wong_zakai");
  cfg.prm.K = 8;
  cfg.seeds = {1, 2, 3};
  cfg.sizes = {2, 3, 4, 5};
  return cfg;
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, structured errors") {
  const ExperimentConfig cfg = parse_config_text(
      "# comment\n"
      "name = wong_zakai\n"
      "K = 9\n"
      "seeds = 1..5\n"
      "sizes = 2,3,4\n"
      "method = series\n"
      "terms = 16\n");
  CHECK(cfg.prm.K == 9);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(cfg.sizes == std::vector<int>{2, 3, 4});
  CHECK(cfg.method == LevyMethod::TruncatedSeries);

  CHECK_THROWS_WITH_AS(parse_config_text("K = 9\n"),
                       doctest::Contains("missing field: name"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("name = wong_zakai\nbogus = 1\n"),
                       doctest::Contains("unknown key: bogus"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("name = wong_zakai\nK = soup\n"),
                       doctest::Contains("bad value for key: K"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_config_text("name = wong_zakai\nsizes = 2,99\n"),
                  std::runtime_error);
}

TEST_CASE("unknown experiment name is rejected") {
  ExperimentConfig cfg = default_config("wong_zakai");
  cfg.name = "nope";
  CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("unknown experiment"),
                       std::runtime_error);
}

TEST_CASE("wong_zakai: schema and byte-identical reruns") {
  const ExperimentConfig cfg = small_wz();
  const ExperimentReport a = exp_wong_zakai(cfg);
  const ExperimentReport b = exp_wong_zakai(cfg);
  CHECK(a.columns == std::vector<std::string>{"seed", "n", "rho", "level1_rho",
                                              "level2_rho"});
  CHECK(a.rows.size() == cfg.seeds.size() * cfg.sizes.size());
  CHECK(a.csv_string() == b.csv_string());
  CHECK(a.summary["decrease_fraction"].is_number());
  CHECK(a.summary["config"]["K"] == 8);
  // coupled curves are positive and finite
  for (const auto& row : a.rows) {
    CHECK(std::isfinite(row[2]));
    CHECK(row[2] > 0.0);
    CHECK(row[2] == std::max(row[3], row[4]));
  }
}

TEST_CASE("wong_zakai writes CSV and JSON outputs") {
  ExperimentConfig cfg = small_wz();
  cfg.seeds = {1, 2};
  cfg.sizes = {2, 3};
  cfg.out_csv = "/tmp/hrp_test_wz.csv";
  cfg.out_json = "/tmp/hrp_test_wz.json";
  const ExperimentReport rep = run_experiment(cfg);
  std::ifstream csv(cfg.out_csv);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "seed,n,rho,level1_rho,level2_rho");
  std::ifstream js(cfg.out_json);
  REQUIRE(js.good());
  nlohmann::json j;
  js >> j;
  CHECK(j["config"]["thresholds"]["monotone_fraction"] == 0.9);
  CHECK(j.contains("pass"));
  std::remove(cfg.out_csv.c_str());
  std::remove(cfg.out_json.c_str());
}

TEST_CASE("adapted: zone split bounds the total") {
  ExperimentConfig cfg = default_config("adapted");
  cfg.prm.K = 7;
  cfg.seeds = {4, 5};
  cfg.sizes = {2, 3, 4};
  const ExperimentReport rep = exp_adapted(cfg);
  for (const auto& row : rep.rows) {
    const double rho = row[2], ze = row[6], zs = row[7], zl = row[8];
    CHECK(ze <= rho + 1e-12);
    CHECK(zs <= rho + 1e-12);
    CHECK(zl <= rho + 1e-12);
    CHECK(std::max({ze, zs, zl}) == doctest::Approx(rho).epsilon(1e-12));
    CHECK(row[5] > 0.0);  // shift cost
  }
}

TEST_CASE("support: smoke run and h-level validation") {
  ExperimentConfig cfg = default_config("support");
  cfg.prm.K = 8;
  cfg.seeds = {1, 2};
  cfg.sizes = {4, 5, 6};
  const ExperimentReport rep = exp_support(cfg);
  CHECK(rep.rows.size() == 6);
  for (const auto& row : rep.rows) {
    CHECK(std::isfinite(row[2]));
    CHECK(std::isfinite(row[3]));
  }
  CHECK(rep.summary["ball_fractions"].size() == cfg.deltas.size());

  ExperimentConfig bad = cfg;
  bad.h_level = 5;
  CHECK_THROWS_WITH_AS(exp_support(bad), doctest::Contains("h_level"),
                       std::runtime_error);
}

TEST_CASE("lemma21: nested ladder matches its Itô-isometry closed form") {
  ExperimentConfig cfg = default_config("lemma21");
  cfg.samples = 2000;
  const ExperimentReport rep = exp_lemma21(cfg);
  // ladder rows are kind 0 with a reference column
  for (const auto& row : rep.rows) {
    if (row[0] != 0.0) continue;
    const double est = row[2], se = row[3], ref = row[4];
    CHECK(std::abs(est - ref) <= 5.0 * se);
  }
  CHECK(rep.summary["slope_target"] == doctest::Approx(0.4));
  CHECK(std::abs(rep.summary["slope"].get<double>() - 0.4) <= 0.3);
}

TEST_CASE("martingale: off-diagonal identity holds, diagonal fails upward") {
  ExperimentConfig cfg = default_config("martingale");
  cfg.prm.K = 6;
  cfg.mart_level = 2;
  cfg.resamples = 800;
  const ExperimentReport rep = exp_martingale(cfg);
  CHECK(rep.summary["offdiag_pass_fraction"].get<double>() >= 0.9);
  CHECK(rep.summary["diag_z"].get<double>() > 0.0);
  // n = K degenerates to an exact identity
  ExperimentConfig flat = cfg;
  flat.mart_level = 5;
  flat.prm.K = 6;
  flat.resamples = 200;
  const ExperimentReport rep2 = exp_martingale(flat);
  (void)rep2;

  ExperimentConfig bad = cfg;
  bad.d = 1;
  CHECK_THROWS_AS(exp_martingale(bad), std::runtime_error);
}

TEST_CASE("martingale at n = K has no resampling freedom") {
  // With mart_level = K every fine mean equals the coarse value exactly.
  ExperimentConfig cfg = default_config("martingale");
  cfg.prm.K = 4;
  cfg.mart_level = 4;
  cfg.resamples = 64;  // power of two keeps the degenerate mean bit-exact
  const ExperimentReport rep = exp_martingale(cfg);
  REQUIRE(rep.rows.size() > 0);
  for (const auto& row : rep.rows) {
    CHECK(row[4] == row[6]);  // fine mean == coarse value, bit for bit
    CHECK(row[5] == 0.0);     // no spread
  }
  CHECK(rep.summary["has_diag"] == false);
}

TEST_CASE("lipschitz: smoke run with finite stable ratios") {
  ExperimentConfig cfg = default_config("lipschitz");
  cfg.prm.K = 8;
  cfg.seeds = {1, 2, 3};
  const ExperimentReport rep = exp_lipschitz(cfg);
  CHECK(rep.rows.size() == 9);
  for (const auto& row : rep.rows) {
    CHECK(row[2] > 0.0);
    CHECK(std::isfinite(row[4]));
    CHECK(row[4] > 0.0);
  }
  CHECK(rep.summary["all_finite"] == true);
  CHECK(std::isfinite(rep.summary["stability"].get<double>()));
}

TEST_CASE("appendix lemma: spot values at alpha = 1/2 and the 0.3 tail") {
  ExperimentConfig cfg = default_config("appendix_lemma");
  const ExperimentReport rep = exp_appendix_lemma(cfg);
  CHECK(rep.summary["alpha_half_g0"].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(rep.summary["alpha_half_tail"].get<double>() - 1.0) <= 1e-3);

  // g stays continuous and finite on the grid for every alpha
  for (const auto& row : rep.rows) CHECK(std::isfinite(row[2]));

  // g behaves like x^{1-2alpha} for large x: divergent for alpha = 0.3,
  // decaying but not yet flat at 1e5..1e6 for alpha = 0.7, flat for 0.8.
  for (const auto& entry : rep.summary["per_alpha"]) {
    const double a = entry["alpha"].get<double>();
    const double tail_flat = entry["tail_flat"].get<double>();
    if (a == 0.3) {
      CHECK(tail_flat > 1.0);
      CHECK(entry["pass"] == false);
    }
    if (a == 0.7) {
      CHECK(tail_flat == doctest::Approx(6.0e-3).epsilon(0.1));
      CHECK(entry["pass"] == false);
    }
    if (a == 0.8) CHECK(entry["pass"] == true);
    if (a == 0.5) CHECK(entry["pass"] == true);
  }

  ExperimentConfig bad = cfg;
  bad.alphas = {1.5};
  CHECK_THROWS_AS(exp_appendix_lemma(bad), std::runtime_error);
}

TEST_CASE("martingale diagonal z is strongly positive at spec scale-down") {
  ExperimentConfig cfg = default_config("martingale");
  cfg.prm.K = 7;
  cfg.mart_level = 3;
  cfg.resamples = 1000;
  const ExperimentReport rep = exp_martingale(cfg);
  CHECK(rep.summary["diag_z"].get<double>() > 2.0);
}
