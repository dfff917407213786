#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrp/approx.hpp"
#include "hrp/experiments.hpp"
#include "hrp/rde.hpp"
#include "hrp/sampler.hpp"
#include "hrp/serialize.hpp"

namespace {

std::vector<double> parse_vector(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

hrp::VectorFieldSpec parse_field(const std::string& spec, std::size_t d) {
  if (spec == "zero") return hrp::make_zero_field(d, d);
  if (spec == "linear-scalar") return hrp::make_linear_scalar_field();
  if (spec.rfind("constant:", 0) == 0) {
    const std::string path = spec.substr(9);
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open matrix file: " + path);
    std::size_t rows = 0, cols = 0;
    if (!(is >> rows >> cols)) throw std::runtime_error("matrix file: bad header");
    std::vector<double> m(rows * cols);
    for (auto& v : m)
      if (!(is >> v)) throw std::runtime_error("matrix file: truncated");
    return hrp::make_constant_field(rows, cols, std::move(m));
  }
  if (spec.rfind("custom:", 0) == 0)
    return hrp::field_by_name(spec.substr(7), d);
  throw std::runtime_error("bad field spec: " + spec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hrp: Hölder rough path numerics"};
  app.require_subcommand(1);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "sample enhanced Brownian motion");
  int s_K = 12;
  std::size_t s_d = 2;
  std::string s_flavor = "stratonovich", s_method = "bridge", s_out;
  std::uint64_t s_seed = 1, s_stream = 0;
  int s_m = 4, s_terms = 32;
  sample->add_option("--K", s_K, "grid depth");
  sample->add_option("--d", s_d, "dimension");
  sample->add_option("--flavor", s_flavor, "stratonovich | ito");
  sample->add_option("--method", s_method, "bridge | series");
  sample->add_option("--m", s_m, "bridge levels per interval");
  sample->add_option("--terms", s_terms, "series truncation");
  sample->add_option("--seed", s_seed, "rng seed");
  sample->add_option("--stream", s_stream, "rng substream");
  sample->add_option("--out", s_out, "output path")->required();

  // ---- approx ----
  auto* approx = app.add_subcommand("approx", "approximation constructions");
  approx->set_help_flag("--help", "print help");  // frees --h for the shift path
  std::string a_in, a_op, a_h, a_out;
  int a_n = 4;
  approx->add_option("--in", a_in, "input rough path file")->required();
  approx->add_option("--op", a_op, "coarsen | adapted | translate | girsanov")
      ->required();
  approx->add_option("--n", a_n, "dyadic level");
  approx->add_option("--h", a_h, "dyadic path file (translate/girsanov)");
  approx->add_option("--out", a_out, "output path")->required();

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "solve dy = f(y) dx");
  std::string v_driver, v_field = "linear-scalar", v_y0 = "1", v_out, v_lift_out;
  bool v_lift = false;
  int v_substeps = 0;
  solve_cmd->add_option("--driver", v_driver, "driver rough path file")
      ->required();
  solve_cmd->add_option("--field", v_field,
                        "zero | constant:<file> | linear-scalar | custom:<name>");
  solve_cmd->add_option("--y0", v_y0, "initial point, comma separated");
  solve_cmd->add_flag("--lift", v_lift, "also write the lifted solution");
  solve_cmd->add_option("--lift-out", v_lift_out, "lifted output path");
  solve_cmd->add_option("--substeps", v_substeps,
                        "extra dyadic refinement (smooth drivers only)");
  solve_cmd->add_option("--out", v_out, "solution output path")->required();

  // ---- run ----
  auto* run = app.add_subcommand("run", "run a seeded experiment");
  std::string r_config;
  run->add_option("--config", r_config, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) {
      hrp::EbmConfig cfg;
      cfg.K = s_K;
      cfg.d = s_d;
      cfg.flavor = hrp::flavor_from_string(s_flavor);
      if (s_method == "bridge") cfg.method = hrp::LevyMethod::BridgeSubdivision;
      else if (s_method == "series") cfg.method = hrp::LevyMethod::TruncatedSeries;
      else throw std::runtime_error("bad method: " + s_method);
      cfg.m = s_m;
      cfg.terms = s_terms;
      hrp::RngStream rng(s_seed, s_stream);
      hrp::write_grid_rough_path(s_out, hrp::sample_ebm(cfg, rng));
      return 0;
    }

    if (*approx) {
      const hrp::GridRoughPath x = hrp::read_grid_rough_path(a_in);
      hrp::GridRoughPath out;
      if (a_op == "coarsen") {
        out = hrp::coarsen(x, a_n);
      } else if (a_op == "adapted") {
        out = hrp::adapted_approx(x, a_n);
      } else if (a_op == "translate") {
        if (a_h.empty()) throw std::runtime_error("translate needs --h");
        out = hrp::translate(x, hrp::read_dyadic_path(a_h));
      } else if (a_op == "girsanov") {
        if (a_h.empty()) throw std::runtime_error("girsanov needs --h");
        out = hrp::girsanov_path(x, hrp::read_dyadic_path(a_h), a_n);
      } else {
        throw std::runtime_error("bad op: " + a_op);
      }
      hrp::write_grid_rough_path(a_out, out);
      return 0;
    }

    if (*solve_cmd) {
      hrp::GridRoughPath x = hrp::read_grid_rough_path(v_driver);
      if (v_substeps > 0) {
        if (x.flavor() != hrp::Flavor::SmoothLift)
          throw std::runtime_error("--substeps applies to smooth drivers only");
        int k = 0;
        if (!x.dyadic_depth(k))
          throw std::runtime_error("--substeps needs a dyadic driver");
        hrp::DyadicPath p{k, x.dim(), x.values_flat()};
        const int fine = k + v_substeps;
        const std::size_t n = std::size_t{1} << fine;
        std::vector<double> times(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
          times[i] = std::ldexp(static_cast<double>(i), -fine);
        x = hrp::pl_lift(std::move(times), x.dim(), p.values_at_depth(fine));
      }
      const hrp::VectorFieldSpec f = parse_field(v_field, x.dim());
      const std::vector<double> y0 = parse_vector(v_y0);
      const hrp::SolutionPath y = hrp::solve(x, f, y0);
      hrp::write_solution_path(v_out, y.times, y.out_dim, y.values);
      if (v_lift || !v_lift_out.empty()) {
        const std::string path = v_lift_out.empty() ? v_out + ".lift" : v_lift_out;
        hrp::write_grid_rough_path(path, hrp::lift_solution(y, x, f));
      }
      return 0;
    }

    if (*run) {
      const hrp::ExperimentConfig cfg = hrp::parse_config_file(r_config);
      const hrp::ExperimentReport rep = hrp::run_experiment(cfg);
      std::cout << rep.summary.dump(2) << '\n';
      return rep.pass ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
