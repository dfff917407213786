#include "hrp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hrp/approx.hpp"
#include "hrp/metrics.hpp"
#include "hrp/rde.hpp"
#include "hrp/serialize.hpp"

namespace hrp {

namespace {

std::vector<double> dyadic_times(int k) {
  const std::size_t n = std::size_t{1} << k;
  const double mesh = std::ldexp(1.0, -k);
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) t[i] = static_cast<double>(i) * mesh;
  return t;
}

EbmConfig ebm_config_of(const ExperimentConfig& cfg) {
  EbmConfig e;
  e.K = cfg.prm.K;
  e.d = cfg.d;
  e.method = cfg.method;
  e.m = cfg.m;
  e.terms = cfg.terms;
  e.flavor = cfg.flavor;
  return e;
}

struct NeumaierSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Fraction of adjacent decreases in a curve (1.0 when every step decreases).
double decrease_fraction(const std::vector<double>& curve) {
  if (curve.size() < 2) return 1.0;
  std::size_t dec = 0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    if (curve[i + 1] < curve[i]) ++dec;
  return static_cast<double>(dec) / static_cast<double>(curve.size() - 1);
}

std::vector<double> column_means(const std::vector<std::vector<double>>& table) {
  // table[seed][size]
  std::vector<double> out;
  if (table.empty()) return out;
  const std::size_t w = table.front().size();
  out.resize(w);
  for (std::size_t j = 0; j < w; ++j) {
    NeumaierSum s;
    for (const auto& row : table) s.add(row[j]);
    out[j] = s.value() / static_cast<double>(table.size());
  }
  return out;
}

std::vector<double> log2_of(const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::log2(xs[i]);
  return out;
}

DyadicPath bump_direction(int level, std::size_t d, double scale) {
  DyadicPath h;
  h.level = level;
  h.d = d;
  const std::size_t n = h.nodes();
  h.values.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t c = 0; c < d; ++c)
      h.values[i * d + c] = scale * 4.0 * t * (1.0 - t);
  }
  return h;
}

nlohmann::ordered_json curve_json(const std::vector<int>& sizes,
                                  const std::vector<double>& curve) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < curve.size(); ++i)
    j.push_back({{"n", sizes[i]}, {"mean", curve[i]}});
  return j;
}

}  // namespace

double compensated_mean(const std::vector<double>& xs) {
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double sample_std_err(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = compensated_mean(xs);
  NeumaierSum s;
  for (double x : xs) s.add((x - mean) * (x - mean));
  const double var = s.value() / static_cast<double>(xs.size() - 1);
  return std::sqrt(var > 0.0 ? var / static_cast<double>(xs.size()) : 0.0);
}

double regression_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("regression_slope: need two matched samples");
  const double mx = compensated_mean(x), my = compensated_mean(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  if (den == 0.0) throw std::invalid_argument("regression_slope: degenerate x");
  return num / den;
}

DyadicPath default_support_direction(int level, std::size_t d, double scale) {
  DyadicPath h;
  h.level = level;
  h.d = d;
  const std::size_t n = h.nodes();
  h.values.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t c = 0; c < d; ++c) {
      double s;
      if (c == 0)
        s = t;
      else if (c == 1)
        s = 4.0 * t * (1.0 - t);
      else
        s = std::pow(t, static_cast<double>(c));
      h.values[i * d + c] = scale * s;
    }
  }
  return h;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw std::runtime_error("config missing field: name");
  prm.validate();
  if (d < 1) throw std::runtime_error("config: d must be >= 1");
  if (seeds.empty()) throw std::runtime_error("config: seeds must be nonempty");
  for (int n : sizes)
    if (n < 1 || n > prm.K)
      throw std::runtime_error("config: sizes must lie in [1, K]");
  if (!(monotone_fraction >= 0.0 && monotone_fraction <= 1.0))
    throw std::runtime_error("config: monotone_fraction must lie in [0,1]");
}

nlohmann::ordered_json ExperimentConfig::echo() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["p"] = prm.p;
  j["gamma"] = prm.gamma;
  j["K"] = prm.K;
  j["d"] = d;
  j["seeds"] = seeds;
  j["sizes"] = sizes;
  j["method"] = method == LevyMethod::BridgeSubdivision ? "bridge" : "series";
  j["m"] = m;
  j["terms"] = terms;
  j["flavor"] = to_string(flavor);
  j["out_csv"] = out_csv;
  j["out_json"] = out_json;
  j["h_file"] = h_file;
  j["h_level"] = h_level;
  j["h_scale"] = h_scale;
  j["deltas"] = deltas;
  j["samples"] = samples;
  j["resamples"] = resamples;
  j["mart_level"] = mart_level;
  j["epsilons"] = epsilons;
  j["field"] = field;
  j["bump_level"] = bump_level;
  j["y0"] = y0;
  j["alphas"] = alphas;
  j["thresholds"] = {{"monotone_fraction", monotone_fraction},
                     {"slope_band", slope_band},
                     {"stderr_mult", stderr_mult},
                     {"cell_pass_fraction", cell_pass_fraction},
                     {"stability_max", stability_max},
                     {"tail_flat_tol", tail_flat_tol},
                     {"support_delta", support_delta},
                     {"closed_form_stderr_mult", 3.0}};
  return j;
}

ExperimentConfig default_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  if (name == "wong_zakai" || name == "adapted") {
    cfg.sizes = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  } else if (name == "support") {
    cfg.sizes = {6, 7, 8, 9, 10};
  } else if (name == "lemma21") {
    cfg.prm.K = 6;
    cfg.sizes = {2, 3, 4, 5, 6};  // the 2^-k displacement ladder
  } else if (name == "martingale") {
    cfg.prm.K = 8;
  } else if (name == "lipschitz") {
    cfg.d = 1;
  } else if (name == "appendix_lemma") {
    // pure numerics; sampling fields unused
  }
  return cfg;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::runtime_error("config: bad value for key: " + key);
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw std::runtime_error("config: bad value for key: " + key);
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  for (auto& part : split(v, ',')) {
    const std::string t = trim(part);
    if (!t.empty()) out.push_back(parse_double(key, t));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  const auto range = v.find("..");
  if (range != std::string::npos) {
    const long long a = parse_int(key, trim(v.substr(0, range)));
    const long long b = parse_int(key, trim(v.substr(range + 2)));
    for (long long q = a; q <= b; ++q) out.push_back(static_cast<int>(q));
    return out;
  }
  for (auto& part : split(v, ',')) {
    const std::string t = trim(part);
    if (!t.empty()) out.push_back(static_cast<int>(parse_int(key, t)));
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& key,
                                           const std::string& v) {
  std::vector<std::uint64_t> out;
  for (int q : parse_int_list(key, v)) {
    if (q < 0) throw std::runtime_error("config: bad value for key: " + key);
    out.push_back(static_cast<std::uint64_t>(q));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  // First pass only to find the name, so defaults can be applied first.
  std::string name;
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key = value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "name") name = val;
    kv.emplace_back(key, val);
  }
  if (name.empty()) throw std::runtime_error("config missing field: name");

  ExperimentConfig cfg = default_config(name);
  for (const auto& [key, val] : kv) {
    if (key == "name") cfg.name = val;
    else if (key == "p") cfg.prm.p = parse_double(key, val);
    else if (key == "gamma") cfg.prm.gamma = parse_double(key, val);
    else if (key == "K") cfg.prm.K = static_cast<int>(parse_int(key, val));
    else if (key == "d") cfg.d = static_cast<std::size_t>(parse_int(key, val));
    else if (key == "seeds") cfg.seeds = parse_seed_list(key, val);
    else if (key == "sizes") cfg.sizes = parse_int_list(key, val);
    else if (key == "method") {
      if (val == "bridge") cfg.method = LevyMethod::BridgeSubdivision;
      else if (val == "series") cfg.method = LevyMethod::TruncatedSeries;
      else throw std::runtime_error("config: bad value for key: method");
    } else if (key == "m") cfg.m = static_cast<int>(parse_int(key, val));
    else if (key == "terms") cfg.terms = static_cast<int>(parse_int(key, val));
    else if (key == "flavor") cfg.flavor = flavor_from_string(val);
    else if (key == "out_csv") cfg.out_csv = val;
    else if (key == "out_json") cfg.out_json = val;
    else if (key == "h_file") cfg.h_file = val;
    else if (key == "h_level") cfg.h_level = static_cast<int>(parse_int(key, val));
    else if (key == "h_scale") cfg.h_scale = parse_double(key, val);
    else if (key == "deltas") cfg.deltas = parse_double_list(key, val);
    else if (key == "samples") cfg.samples = static_cast<int>(parse_int(key, val));
    else if (key == "resamples") cfg.resamples = static_cast<int>(parse_int(key, val));
    else if (key == "mart_level") cfg.mart_level = static_cast<int>(parse_int(key, val));
    else if (key == "epsilons") cfg.epsilons = parse_double_list(key, val);
    else if (key == "field") cfg.field = val;
    else if (key == "bump_level") cfg.bump_level = static_cast<int>(parse_int(key, val));
    else if (key == "y0") cfg.y0 = parse_double_list(key, val);
    else if (key == "alphas") cfg.alphas = parse_double_list(key, val);
    else if (key == "monotone_fraction") cfg.monotone_fraction = parse_double(key, val);
    else if (key == "slope_band") cfg.slope_band = parse_double(key, val);
    else if (key == "stderr_mult") cfg.stderr_mult = parse_double(key, val);
    else if (key == "cell_pass_fraction") cfg.cell_pass_fraction = parse_double(key, val);
    else if (key == "stability_max") cfg.stability_max = parse_double(key, val);
    else if (key == "tail_flat_tol") cfg.tail_flat_tol = parse_double(key, val);
    else if (key == "support_delta") cfg.support_delta = parse_double(key, val);
    else throw std::runtime_error("config: unknown key: " + key);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

std::string ExperimentReport::csv_string() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) os << ',';
    os << columns[c];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_double(row[c]);
    }
    os << '\n';
  }
  return os.str();
}

void ExperimentReport::write(const ExperimentConfig& cfg) const {
  if (!cfg.out_csv.empty()) {
    std::ofstream os(cfg.out_csv);
    if (!os) throw std::runtime_error("cannot open for writing: " + cfg.out_csv);
    os << csv_string();
  }
  if (!cfg.out_json.empty()) {
    std::ofstream os(cfg.out_json);
    if (!os) throw std::runtime_error("cannot open for writing: " + cfg.out_json);
    os << summary.dump(2) << '\n';
  }
}

ExperimentReport exp_wong_zakai(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sizes.empty()) throw std::runtime_error("config missing field: sizes");
  const std::size_t ns = cfg.seeds.size(), nn = cfg.sizes.size();
  const EbmConfig ecfg = ebm_config_of(cfg);

  std::vector<std::vector<double>> r(ns, std::vector<double>(nn)),
      r1(ns, std::vector<double>(nn)), r2(ns, std::vector<double>(nn));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(ns); ++si) {
    RngStream rng(cfg.seeds[si], 0);
    const GridRoughPath beta = sample_ebm(ecfg, rng);
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const GridRoughPath approx = coarsen(beta, cfg.sizes[ni]);
      const NormReport rep = rho_report(approx, beta, cfg.prm);
      r[si][ni] = rep.value;
      r1[si][ni] = rep.per_level[0];
      r2[si][ni] = rep.per_level[1];
    }
  }

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"seed", "n", "rho", "level1_rho", "level2_rho"};
  for (std::size_t si = 0; si < ns; ++si)
    for (std::size_t ni = 0; ni < nn; ++ni)
      out.rows.push_back({static_cast<double>(cfg.seeds[si]),
                          static_cast<double>(cfg.sizes[ni]), r[si][ni],
                          r1[si][ni], r2[si][ni]});

  const std::vector<double> mean = column_means(r);
  const std::vector<double> mean1 = column_means(r1);
  const std::vector<double> mean2 = column_means(r2);
  std::vector<double> n_real(cfg.sizes.begin(), cfg.sizes.end());
  const double frac = decrease_fraction(mean);
  const double slope = regression_slope(n_real, log2_of(mean));
  const double slope1 = regression_slope(n_real, log2_of(mean1));
  out.pass = frac >= cfg.monotone_fraction;

  out.summary["experiment"] = cfg.name;
  out.summary["mean_rho"] = curve_json(cfg.sizes, mean);
  out.summary["mean_level1_rho"] = curve_json(cfg.sizes, mean1);
  out.summary["mean_level2_rho"] = curve_json(cfg.sizes, mean2);
  out.summary["decrease_fraction"] = frac;
  out.summary["log2_slope"] = slope;
  out.summary["log2_slope_level1"] = slope1;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport exp_adapted(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sizes.empty()) throw std::runtime_error("config missing field: sizes");
  const std::size_t ns = cfg.seeds.size(), nn = cfg.sizes.size();
  const EbmConfig ecfg = ebm_config_of(cfg);

  std::vector<std::vector<double>> r(ns, std::vector<double>(nn)),
      r1(ns, std::vector<double>(nn)), r2(ns, std::vector<double>(nn)),
      rs(ns, std::vector<double>(nn)), ze(ns, std::vector<double>(nn)),
      zs(ns, std::vector<double>(nn)), zl(ns, std::vector<double>(nn));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(ns); ++si) {
    RngStream rng(cfg.seeds[si], 0);
    const GridRoughPath beta = sample_ebm(ecfg, rng);
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const int n = cfg.sizes[ni];
      const GridRoughPath ad = adapted_approx(beta, n);
      const std::size_t split = std::size_t{1} << (cfg.prm.K - n);
      const ZoneReports zones = rho_zone_reports(ad, beta, cfg.prm, split);
      const double total = std::max({zones.early.value, zones.straddle.value,
                                     zones.late.value});
      r[si][ni] = total;
      r1[si][ni] = std::max({zones.early.per_level[0],
                             zones.straddle.per_level[0],
                             zones.late.per_level[0]});
      r2[si][ni] = std::max({zones.early.per_level[1],
                             zones.straddle.per_level[1],
                             zones.late.per_level[1]});
      ze[si][ni] = zones.early.value;
      zs[si][ni] = zones.straddle.value;
      zl[si][ni] = zones.late.value;
      const GridRoughPath shifted = tau_shift(beta, std::ldexp(1.0, -n));
      rs[si][ni] = rho(shifted, beta, cfg.prm);
    }
  }

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"seed",      "n",         "rho",          "level1_rho",
                 "level2_rho", "shift_rho", "zone_early",   "zone_straddle",
                 "zone_late"};
  for (std::size_t si = 0; si < ns; ++si)
    for (std::size_t ni = 0; ni < nn; ++ni)
      out.rows.push_back({static_cast<double>(cfg.seeds[si]),
                          static_cast<double>(cfg.sizes[ni]), r[si][ni],
                          r1[si][ni], r2[si][ni], rs[si][ni], ze[si][ni],
                          zs[si][ni], zl[si][ni]});

  const std::vector<double> mean = column_means(r);
  const std::vector<double> mean_shift = column_means(rs);
  const double frac = decrease_fraction(mean);
  const double frac_shift = decrease_fraction(mean_shift);
  out.pass = frac >= cfg.monotone_fraction && frac_shift >= cfg.monotone_fraction;

  out.summary["experiment"] = cfg.name;
  out.summary["mean_rho"] = curve_json(cfg.sizes, mean);
  out.summary["mean_shift_rho"] = curve_json(cfg.sizes, mean_shift);
  out.summary["decrease_fraction"] = frac;
  out.summary["shift_decrease_fraction"] = frac_shift;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport exp_support(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sizes.empty()) throw std::runtime_error("config missing field: sizes");
  DyadicPath h = cfg.h_file.empty()
                     ? default_support_direction(cfg.h_level, cfg.d, cfg.h_scale)
                     : read_dyadic_path(cfg.h_file);
  if (h.d != cfg.d) throw std::runtime_error("config: h dimension mismatch");
  const int min_n = *std::min_element(cfg.sizes.begin(), cfg.sizes.end());
  if (h.level > min_n)
    throw std::runtime_error("config: h_level must not exceed the smallest size");

  const std::size_t ns = cfg.seeds.size(), nn = cfg.sizes.size();
  const EbmConfig ecfg = ebm_config_of(cfg);
  const GridRoughPath h_lift =
      pl_lift(dyadic_times(cfg.prm.K), cfg.d, h.values_at_depth(cfg.prm.K));

  std::vector<std::vector<double>> inner(ns, std::vector<double>(nn)),
      outer(ns, std::vector<double>(nn));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(ns); ++si) {
    RngStream rng(cfg.seeds[si], 0);
    const GridRoughPath beta = sample_ebm(ecfg, rng);
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const int n = cfg.sizes[ni];
      inner[si][ni] = rho(adapted_approx(beta, n), beta, cfg.prm);
      const GridRoughPath t_path = girsanov_path(beta, h, n);
      outer[si][ni] = rho(t_path, h_lift, cfg.prm);
    }
  }

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"seed", "n", "inner_rho", "outer_rho"};
  for (std::size_t si = 0; si < ns; ++si)
    for (std::size_t ni = 0; ni < nn; ++ni)
      out.rows.push_back({static_cast<double>(cfg.seeds[si]),
                          static_cast<double>(cfg.sizes[ni]), inner[si][ni],
                          outer[si][ni]});

  const std::vector<double> mean_in = column_means(inner);
  const std::vector<double> mean_out = column_means(outer);
  const double frac_in = decrease_fraction(mean_in);
  const double frac_out = decrease_fraction(mean_out);

  // Fraction of seeds whose outer statistic at the largest n falls inside a
  // rho-ball of each delta.
  nlohmann::ordered_json ball = nlohmann::ordered_json::array();
  double frac_at_support_delta = 0.0;
  for (double delta : cfg.deltas) {
    std::size_t within = 0;
    for (std::size_t si = 0; si < ns; ++si)
      if (outer[si][nn - 1] < delta) ++within;
    const double f = static_cast<double>(within) / static_cast<double>(ns);
    ball.push_back({{"delta", delta}, {"fraction_within", f}});
    if (delta == cfg.support_delta) frac_at_support_delta = f;
  }

  out.pass = frac_out >= cfg.monotone_fraction && frac_at_support_delta > 0.0;

  out.summary["experiment"] = cfg.name;
  out.summary["mean_inner_rho"] = curve_json(cfg.sizes, mean_in);
  out.summary["mean_outer_rho"] = curve_json(cfg.sizes, mean_out);
  out.summary["inner_decrease_fraction"] = frac_in;
  out.summary["outer_decrease_fraction"] = frac_out;
  out.summary["ball_fractions"] = ball;
  out.summary["fraction_within_support_delta"] = frac_at_support_delta;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport exp_lemma21(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sizes.empty()) throw std::runtime_error("config missing field: sizes");
  if (cfg.d < 2) throw std::runtime_error("config: lemma21 needs d >= 2");
  const int K = cfg.prm.K;
  for (int k : cfg.sizes)
    if (k < 1 || k > K)
      throw std::runtime_error("config: ladder exponents must lie in [1, K]");

  const std::size_t n = std::size_t{1} << K;
  std::vector<PairQuad> pairs;
  // Nested ladder (0, h) vs (0, 2h), h = 2^-k.
  for (int k : cfg.sizes)
    pairs.push_back({0, n >> k, 0, n >> (k - 1)});
  // Disjoint cells with the independence closed form.
  const std::vector<PairQuad> disjoint = {
      {0, n >> 3, n >> 1, (n >> 1) + (n >> 3)},
      {0, n >> 2, n >> 1, (n >> 1) + (n >> 4)}};
  for (const auto& q : disjoint) pairs.push_back(q);

  const EbmConfig ecfg = ebm_config_of(cfg);
  const std::vector<MomentEstimate> est =
      moment_probe(ecfg, cfg.prm.p, pairs, cfg.samples, cfg.seeds.front());

  const double alpha = 2.0 / cfg.prm.p;
  const double nested_const =
      0.5 - std::pow(2.0, -alpha) + std::pow(2.0, 1.0 - 2.0 * alpha);

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"kind", "h", "estimate", "std_err", "reference"};
  std::vector<double> log_h, log_est;
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    const double h = std::ldexp(1.0, -cfg.sizes[i]);
    const double ref = nested_const * std::pow(h, 2.0 - 2.0 * alpha);
    out.rows.push_back({0.0, h, est[i].mean, est[i].std_err, ref});
    log_h.push_back(std::log(h));
    log_est.push_back(std::log(est[i].mean));
  }
  bool disjoint_ok = true;
  double worst_disjoint_z = 0.0;
  for (std::size_t q = 0; q < disjoint.size(); ++q) {
    const std::size_t i = cfg.sizes.size() + q;
    const double dt1 =
        static_cast<double>(disjoint[q].t - disjoint[q].s) / static_cast<double>(n);
    const double dt2 = static_cast<double>(disjoint[q].t2 - disjoint[q].s2) /
                       static_cast<double>(n);
    const double ref = 0.5 * (std::pow(dt1, 2.0 - 2.0 * alpha) +
                              std::pow(dt2, 2.0 - 2.0 * alpha));
    const double z = std::abs(est[i].mean - ref) / est[i].std_err;
    worst_disjoint_z = std::max(worst_disjoint_z, z);
    if (z > 3.0) disjoint_ok = false;
    out.rows.push_back({1.0, dt1, est[i].mean, est[i].std_err, ref});
  }

  const double slope = regression_slope(log_h, log_est);
  const double target = 2.0 * (1.0 - 2.0 / cfg.prm.p);
  const bool in_band = std::abs(slope - target) <= cfg.slope_band;
  out.pass = in_band && disjoint_ok;

  out.summary["experiment"] = cfg.name;
  out.summary["slope"] = slope;
  out.summary["slope_target"] = target;
  out.summary["slope_band"] = cfg.slope_band;
  out.summary["slope_in_band"] = in_band;
  out.summary["disjoint_ok"] = disjoint_ok;
  out.summary["worst_disjoint_z"] = worst_disjoint_z;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport exp_martingale(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.d < 2) throw std::runtime_error("config: martingale needs d >= 2");
  const int K = cfg.prm.K;
  const int n = cfg.mart_level;
  if (n < 1 || n > K)
    throw std::runtime_error("config: mart_level must lie in [1, K]");
  const std::size_t d = cfg.d;
  const std::size_t stride = std::size_t{1} << (K - n);

  // Coarse draw held fixed; conditional resampling refines it to depth K.
  RngStream coarse_rng(cfg.seeds.front(), 0);
  std::vector<double> coarse = sample_bm(n, d, coarse_rng);
  DyadicPath coarse_path{n, d, coarse};
  const GridRoughPath coarse_lift =
      pl_lift(dyadic_times(K), d, coarse_path.values_at_depth(K));

  // Cells on the half-node set of the coarse grid: off-diagonal component
  // (0,1) everywhere, plus one diagonal (0,0) straddling cell, which the
  // identity must fail in the positive direction. At n = K there is no
  // resampling freedom and no straddling cell.
  struct Cell {
    std::size_t s, t, ci, cj;
  };
  std::vector<Cell> cells;
  const std::size_t step = stride >= 2 ? stride / 2 : 1;
  const std::size_t n_fine = std::size_t{1} << K;
  const std::size_t points = n_fine / step + 1;
  for (std::size_t a = 0; a < points; ++a)
    for (std::size_t b = a + 1; b < points; ++b)
      cells.push_back({a * step, b * step, 0, 1});
  const std::size_t n_offdiag = cells.size();
  const bool has_diag = stride >= 2;
  if (has_diag) cells.push_back({step, 3 * step, 0, 0});

  const double e2 = 2.0 / cfg.prm.p;
  const int B = cfg.resamples;
  std::vector<double> fine(static_cast<std::size_t>(B) * cells.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (int b = 0; b < B; ++b) {
    RngStream rng(cfg.seeds.front(), 1 + static_cast<std::uint64_t>(b));
    std::vector<double> vals = coarse;
    double mesh = std::ldexp(1.0, -n);
    for (int lev = n; lev < K; ++lev) {
      vals = bridge_refine(vals, d, mesh, rng);
      mesh *= 0.5;
    }
    const GridRoughPath lift = pl_lift(dyadic_times(K), d, vals);
    std::vector<double> l2(d * d);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      lift.level2_into(cells[c].s, cells[c].t, l2);
      const double dt = lift.times()[cells[c].t] - lift.times()[cells[c].s];
      fine[static_cast<std::size_t>(b) * cells.size() + c] =
          l2[cells[c].ci * d + cells[c].cj] / std::pow(dt, e2);
    }
  }

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"s_idx", "t_idx", "comp_i", "comp_j",
                 "fine_mean", "std_err", "coarse_value", "z"};
  std::size_t ok_cells = 0;
  double diag_z = 0.0;
  std::vector<double> l2(d * d), buf(B);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int b = 0; b < B; ++b)
      buf[b] = fine[static_cast<std::size_t>(b) * cells.size() + c];
    const double mean = compensated_mean(buf);
    const double se = sample_std_err(buf);
    coarse_lift.level2_into(cells[c].s, cells[c].t, l2);
    const double dt =
        coarse_lift.times()[cells[c].t] - coarse_lift.times()[cells[c].s];
    const double ref = l2[cells[c].ci * d + cells[c].cj] / std::pow(dt, e2);
    const double z = se > 0.0 ? (mean - ref) / se : 0.0;
    if (c < n_offdiag && std::abs(z) <= cfg.stderr_mult) ++ok_cells;
    if (c == n_offdiag) diag_z = z;
    out.rows.push_back({static_cast<double>(cells[c].s),
                        static_cast<double>(cells[c].t),
                        static_cast<double>(cells[c].ci),
                        static_cast<double>(cells[c].cj), mean, se, ref, z});
  }

  const double frac =
      static_cast<double>(ok_cells) / static_cast<double>(n_offdiag);
  const bool diag_positive = has_diag && diag_z > cfg.stderr_mult;
  out.pass = frac >= cfg.cell_pass_fraction && (!has_diag || diag_positive);

  out.summary["experiment"] = cfg.name;
  out.summary["offdiag_cells"] = n_offdiag;
  out.summary["offdiag_pass_fraction"] = frac;
  out.summary["has_diag"] = has_diag;
  out.summary["diag_z"] = diag_z;
  out.summary["diag_fails_positive"] = diag_positive;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport exp_lipschitz(const ExperimentConfig& cfg) {
  cfg.validate();
  const VectorFieldSpec f = field_by_name(cfg.field, cfg.d);
  if (f.in_dim != cfg.d)
    throw std::runtime_error("config: field input dimension mismatch");
  if (cfg.y0.size() != f.out_dim)
    throw std::runtime_error("config: y0 has wrong dimension");
  const std::size_t ns = cfg.seeds.size(), ne = cfg.epsilons.size();
  const EbmConfig ecfg = ebm_config_of(cfg);

  std::vector<std::vector<double>> rin(ns, std::vector<double>(ne)),
      rout(ns, std::vector<double>(ne)), ratio(ns, std::vector<double>(ne));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(ns); ++si) {
    RngStream rng(cfg.seeds[si], 0);
    const GridRoughPath x = sample_ebm(ecfg, rng);
    for (std::size_t ei = 0; ei < ne; ++ei) {
      const DyadicPath bump =
          bump_direction(cfg.bump_level, cfg.d, cfg.epsilons[ei]);
      const GridRoughPath xhat = translate(x, bump);
      const LipschitzProbe pr = lipschitz_probe(f, x, xhat, cfg.prm, cfg.y0);
      rin[si][ei] = pr.rho_in;
      rout[si][ei] = pr.rho_out;
      ratio[si][ei] = pr.ratio;
    }
  }

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"seed", "epsilon", "rho_in", "rho_out", "ratio"};
  for (std::size_t si = 0; si < ns; ++si)
    for (std::size_t ei = 0; ei < ne; ++ei)
      out.rows.push_back({static_cast<double>(cfg.seeds[si]), cfg.epsilons[ei],
                          rin[si][ei], rout[si][ei], ratio[si][ei]});

  nlohmann::ordered_json per_eps = nlohmann::ordered_json::array();
  double max_of_max = 0.0, min_of_max = 0.0;
  bool all_finite = true;
  for (std::size_t ei = 0; ei < ne; ++ei) {
    double mx = 0.0;
    for (std::size_t si = 0; si < ns; ++si) {
      if (!std::isfinite(ratio[si][ei])) all_finite = false;
      mx = std::max(mx, ratio[si][ei]);
    }
    per_eps.push_back({{"epsilon", cfg.epsilons[ei]}, {"max_ratio", mx}});
    max_of_max = ei == 0 ? mx : std::max(max_of_max, mx);
    min_of_max = ei == 0 ? mx : std::min(min_of_max, mx);
  }
  const double stability = min_of_max > 0.0 ? max_of_max / min_of_max
                                            : std::numeric_limits<double>::infinity();
  out.pass = all_finite && stability <= cfg.stability_max;

  out.summary["experiment"] = cfg.name;
  out.summary["per_epsilon_max_ratio"] = per_eps;
  out.summary["stability"] = stability;
  out.summary["all_finite"] = all_finite;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport exp_appendix_lemma(const ExperimentConfig& cfg) {
  if (cfg.alphas.empty()) throw std::runtime_error("config missing field: alphas");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0))
      throw std::runtime_error("config: alphas must lie in (0,1)");

  // g(x) = (1/2)(1+x)^{2-2a} - x^{2-a}/(1+x)^a + (1/2)x^{2-2a} on a log grid.
  const auto g = [](double x, double a) {
    return 0.5 * std::pow(1.0 + x, 2.0 - 2.0 * a) -
           std::pow(x, 2.0 - a) / std::pow(1.0 + x, a) +
           0.5 * std::pow(x, 2.0 - 2.0 * a);
  };
  std::vector<double> grid;
  grid.push_back(0.0);
  const int per_decade = 8;
  for (int j = 0; j <= 12 * per_decade; ++j)
    grid.push_back(std::pow(10.0, -6.0 + static_cast<double>(j) / per_decade));
  const std::size_t idx_1e5 = 1 + 11 * per_decade;
  const std::size_t idx_1e6 = 1 + 12 * per_decade;

  ExperimentReport out;
  out.name = cfg.name;
  out.columns = {"alpha", "x", "g"};
  nlohmann::ordered_json per_alpha = nlohmann::ordered_json::array();
  bool all_pass = true;
  double g0_half = 0.0, tail_half = 0.0;
  for (double a : cfg.alphas) {
    double sup = -std::numeric_limits<double>::infinity();
    double argmax = 0.0;
    bool finite = true;
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = g(grid[i], a);
      vals[i] = v;
      out.rows.push_back({a, grid[i], v});
      if (!std::isfinite(v)) finite = false;
      if (v > sup) {
        sup = v;
        argmax = grid[i];
      }
    }
    const double tail_value = vals[idx_1e6];
    const double tail_flat = std::abs(vals[idx_1e6] - vals[idx_1e5]);
    const bool pass = finite && tail_flat < cfg.tail_flat_tol;
    if (a == 0.5) {
      g0_half = vals[0];
      tail_half = tail_value;
    }
    all_pass = all_pass && pass;
    per_alpha.push_back({{"alpha", a},
                         {"sup", sup},
                         {"argmax", argmax},
                         {"tail_value", tail_value},
                         {"tail_flat", tail_flat},
                         {"finite", finite},
                         {"pass", pass}});
  }
  out.pass = all_pass;

  out.summary["experiment"] = cfg.name;
  out.summary["per_alpha"] = per_alpha;
  out.summary["alpha_half_g0"] = g0_half;
  out.summary["alpha_half_tail"] = tail_half;
  out.summary["pass"] = out.pass;
  out.summary["config"] = cfg.echo();
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  if (cfg.name == "wong_zakai") rep = exp_wong_zakai(cfg);
  else if (cfg.name == "adapted") rep = exp_adapted(cfg);
  else if (cfg.name == "support") rep = exp_support(cfg);
  else if (cfg.name == "lemma21") rep = exp_lemma21(cfg);
  else if (cfg.name == "martingale") rep = exp_martingale(cfg);
  else if (cfg.name == "lipschitz") rep = exp_lipschitz(cfg);
  else if (cfg.name == "appendix_lemma") rep = exp_appendix_lemma(cfg);
  else throw std::runtime_error("unknown experiment: " + cfg.name);
  rep.write(cfg);
  return rep;
}

}  // namespace hrp
