#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "medlab/filters.hpp"
#include "medlab/grid.hpp"
#include "medlab/median_stats.hpp"
#include "medlab/noise.hpp"
#include "medlab/phantoms.hpp"
#include "medlab/report.hpp"
#include "medlab/risk.hpp"

namespace medlab::cli {

/// Bad flags, names or ranges; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Resolved flags of one invocation.
struct ExperimentConfig {
  std::string subcommand;
  std::string filter = "median";
  std::string phantom = "step";
  std::string model = "gaussian";
  int dim = 0;  // 0: take it from the phantom
  std::vector<int> ns;
  double sigma = 1.0;
  std::string schedule;
  std::vector<double> h;
  std::vector<double> h1;
  std::vector<double> h2;
  int reps = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double stop_ratio = 0.0;
  std::string out;
  std::string svg;
  std::string in;
  std::string experiment;
  bool dump_config = false;
};

namespace detail {

inline std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ";" : "") << v[k];
  return os.str();
}

inline std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ";" : "") << v[k];
  return os.str();
}

inline std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# subcommand=" << c.subcommand << " filter=" << c.filter << " phantom=" << c.phantom << " model=" << c.model
     << " n=" << join(c.ns) << " sigma=" << c.sigma;
  if (!c.schedule.empty()) os << " schedule=" << c.schedule;
  if (!c.h.empty()) os << " h=" << join(c.h);
  if (!c.h1.empty()) os << " h1=" << join(c.h1);
  if (!c.h2.empty()) os << " h2=" << join(c.h2);
  os << " reps=" << c.reps << " seed=" << c.seed << " stop_ratio=" << c.stop_ratio;
  return os.str();
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : medlab::detail::split_csv_line(text)) out.push_back(medlab::detail::parse_double(item));
  return out;
}

// sigma schedule: "const:<s>" or "power:<c>,<a>" meaning c * n^(-a).
inline std::function<double(int)> parse_schedule(const std::string& text, double sigma) {
  if (text.empty()) return [sigma](int) { return sigma; };
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--schedule: expected const:<s> or power:<c>,<a>");
  std::string kind = text.substr(0, colon);
  std::vector<double> args;
  try {
    args = parse_list(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--schedule: bad number in '" + text + "'");
  }
  if (kind == "const" && args.size() == 1 && args[0] >= 0.0) return [s = args[0]](int) { return s; };
  if (kind == "power" && args.size() == 2 && args[0] > 0.0) {
    return [c = args[0], a = args[1]](int n) { return c * std::pow(double(n), -a); };
  }
  throw ConfigError("--schedule: expected const:<s> or power:<c>,<a>, got '" + text + "'");
}

inline std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  return file;
}

inline std::string companion(const std::string& path, const std::string& suffix) {
  auto dot = path.rfind('.');
  auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix + ".csv";
  return path.substr(0, dot) + suffix + path.substr(dot);
}

// Filter family and, for single evaluations, the concrete specs.
struct Resolved {
  Phantom phantom;
  NoiseModel model;
  std::string family;
  std::vector<double> chain;
  std::vector<Phantom> worst_over;  // sweeps report the max over these
};

inline Resolved resolve(const ExperimentConfig& c) {
  Resolved r{Phantom(canonical_step()), NoiseModel(NoiseKind::Gaussian), c.filter, {}, {}};
  try {
    if (c.phantom == "step-family") {
      r.worst_over = step_family();
    } else {
      r.phantom = phantom_by_name(c.phantom);
      r.worst_over = {r.phantom};
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--phantom: ") + e.what());
  }
  try {
    r.model = model_by_name(c.model);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--model: ") + e.what());
  }
  if (c.dim != 0 && c.dim != r.phantom.dim()) {
    throw ConfigError("--dim " + std::to_string(c.dim) + " does not match phantom '" + c.phantom + "'");
  }
  if (c.filter.rfind("chain:", 0) == 0) {
    r.family = "chain";
    try {
      r.chain = parse_list(c.filter.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("--filter: bad width list in '" + c.filter + "'");
    }
    for (double w : r.chain) {
      if (!(w > 0.0 && w < 1.0)) throw ConfigError("--filter: chain widths must lie in (0,1)");
    }
  } else if (c.filter != "linear" && c.filter != "median" && c.filter != "two-scale") {
    throw ConfigError("--filter: unknown filter '" + c.filter + "' (linear|median|two-scale|chain:<h1,h2,...>)");
  }
  if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) throw ConfigError("--sigma must be finite and nonnegative");
  for (int n : c.ns) {
    if (n < 3) throw ConfigError("--n values must be at least 3");
  }
  for (const auto* list : {&c.h, &c.h1, &c.h2}) {
    for (double w : *list) {
      if (!(w > 0.0 && w < 1.0)) throw ConfigError("window widths must lie in (0,1)");
    }
  }
  if (c.stop_ratio != 0.0 && !(c.stop_ratio > 1.0)) throw ConfigError("--stop-ratio must be 0 or exceed 1");
  return r;
}

// Candidate specs for a sweep at one n: explicit widths if given, else the
// default grids.
inline std::vector<FilterSpec> candidates(const ExperimentConfig& c, const Resolved& r, int n) {
  std::vector<FilterSpec> out;
  if (r.family == "chain") {
    out.push_back(ChainSpec{r.chain});
  } else if (r.family == "two-scale") {
    auto h1s = c.h1.empty() ? default_h_grid(n) : c.h1;
    auto h2s = c.h2.empty() ? default_h_grid(n) : c.h2;
    for (double a : h1s) {
      int block = int(std::lround(n * a));
      if (block < 1 || n / block < 3) continue;
      for (double b : h2s) {
        if (b > a) out.push_back(TwoScaleSpec{a, b});
      }
    }
    if (out.empty()) throw ConfigError("no valid (h1, h2) pair for n = " + std::to_string(n));
  } else {
    auto hs = c.h.empty() ? default_h_grid(n) : c.h;
    for (double h : hs) {
      if (r.family == "linear") {
        out.push_back(LinearSpec{h});
      } else {
        out.push_back(MedianSpec{h});
      }
    }
  }
  return out;
}

inline FilterSpec single_spec(const ExperimentConfig& c, const Resolved& r) {
  if (r.family == "chain") return ChainSpec{r.chain};
  if (r.family == "two-scale") {
    if (c.h1.size() != 1 || c.h2.size() != 1) throw ConfigError("two-scale needs one --h1 and one --h2");
    if (!(c.h1[0] < c.h2[0])) throw ConfigError("two-scale needs --h1 < --h2");
    return TwoScaleSpec{c.h1[0], c.h2[0]};
  }
  if (c.h.size() != 1) throw ConfigError("--h needs exactly one width");
  if (r.family == "linear") return LinearSpec{c.h[0]};
  return MedianSpec{c.h[0]};
}

inline RiskConfig risk_config(const ExperimentConfig& c, const Resolved& r, int n) {
  RiskConfig cfg{r.phantom, r.model, c.sigma, n, c.reps, c.seed, c.threads};
  return cfg;
}

inline void check_layouts(const std::vector<FilterSpec>& specs, int n) {
  for (const auto& s : specs) {
    if (auto* t = std::get_if<TwoScaleSpec>(&s)) {
      try {
        BlockLayout(n, t->h1);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("two-scale at n = ") + std::to_string(n) + ": " + e.what());
      }
    }
  }
}

inline Series risk_series(const RiskReport& report, const std::string& name) {
  Series s{name, {}};
  for (const auto& rec : report.records) s.points.emplace_back(rec.h1, rec.mse);
  return s;
}

inline void maybe_svg(const ExperimentConfig& c, const std::string& title, const std::vector<Series>& series,
                      bool log_x, bool log_y) {
  if (c.svg.empty()) return;
  std::ofstream file(c.svg);
  if (!file) throw std::runtime_error("cannot open SVG file '" + c.svg + "'");
  write_svg(file, title, series, log_x, log_y);
}

inline std::string label(const ExperimentConfig& c) { return c.experiment.empty() ? c.subcommand : c.experiment; }

inline int cmd_sweep(const ExperimentConfig& c, std::ostream& say) {
  Resolved r = resolve(c);
  if (c.ns.size() != 1) throw ConfigError("sweep needs exactly one --n");
  int n = c.ns.front();
  auto specs = candidates(c, r, n);
  check_layouts(specs, n);
  if (c.reps < 2) throw ConfigError("--reps must be at least 2");

  RiskReport report = sweep_family(risk_config(c, r, n), r.worst_over, specs, {c.stop_ratio, 2});
  std::ofstream file;
  std::ostream& os = open_out(c.out, file);
  if (c.dump_config) os << describe(c) << '\n';
  os << kRiskCsvHeader << '\n';
  write_risk_rows(os, label(c), report);
  const auto& best = report.best();
  say << "sweep " << filter_name(best.spec) << " n=" << n << ": min mse " << best.mse << " at h1=" << best.h1;
  if (!std::isnan(best.h2)) say << " h2=" << best.h2;
  say << (report.truncated ? " (grid truncated early)" : "") << '\n';
  maybe_svg(c, "risk vs h, n = " + std::to_string(n), {risk_series(report, filter_name(best.spec))}, true, true);
  return 0;
}

inline int cmd_rates(const ExperimentConfig& c, std::ostream& say) {
  Resolved r = resolve(c);
  if (c.ns.size() < 3) throw ConfigError("rates needs at least three --n values");
  if (r.family == "chain") throw ConfigError("rates needs a linear, median or two-scale filter");
  if (c.reps < 2) throw ConfigError("--reps must be at least 2");
  std::vector<std::vector<FilterSpec>> all;
  for (int n : c.ns) {
    all.push_back(candidates(c, r, n));
    check_layouts(all.back(), n);
  }

  std::vector<RiskReport> reports;
  std::vector<std::pair<double, double>> points;
  for (std::size_t k = 0; k < c.ns.size(); ++k) {
    reports.push_back(sweep_family(risk_config(c, r, c.ns[k]), r.worst_over, all[k], {c.stop_ratio, 2}));
    points.emplace_back(double(c.ns[k]), reports.back().best().mse);
  }
  RateFit fit = rate_fit(points);

  std::ofstream file;
  std::ostream& os = open_out(c.out, file);
  if (c.dump_config) os << describe(c) << '\n';
  os << kRiskCsvHeader << '\n';
  for (const auto& rep : reports) write_risk_rows(os, label(c), rep);
  if (!c.out.empty() && c.out != "-") {
    std::ofstream fit_file(companion(c.out, "_fit"));
    if (!fit_file) throw std::runtime_error("cannot open fit file");
    if (c.dump_config) fit_file << describe(c) << '\n';
    fit_file << kFitCsvHeader << '\n';
    write_fit_row(fit_file, label(c), fit);
  }
  say << "rates " << c.filter << ": slope " << fit.slope << " intercept " << fit.intercept << " r2 " << fit.r_squared
      << '\n';
  maybe_svg(c, "min risk vs n (" + c.filter + ")", {{c.filter, points}}, true, true);
  return 0;
}

inline int cmd_profile(const ExperimentConfig& c, std::ostream& say) {
  Resolved r = resolve(c);
  if (r.worst_over.size() > 1) throw ConfigError("--phantom step-family only applies to rates and sweep");
  if (c.ns.size() != 1) throw ConfigError("profile needs exactly one --n");
  if (c.reps < 1000) throw ConfigError("profile needs --reps of at least 1000");
  FilterSpec spec = single_spec(c, r);
  int n = c.ns.front();
  check_layouts({spec}, n);

  RiskConfig cfg = risk_config(c, r, n);
  Profile p = bias_profile(cfg, spec);
  GridSample truth = r.phantom.sample(n);
  std::ofstream file;
  std::ostream& os = open_out(c.out, file);
  if (c.dump_config) os << describe(c) << '\n';
  Series mean{"mean", {}}, clean{"truth", {}};
  if (truth.dim() == 1) {
    os << "i,truth,mean,stderr\n";
    for (int i = 1; i <= n; ++i) {
      std::size_t k = std::size_t(i - 1);
      os << i << ',' << medlab::detail::fmt(truth[k]) << ',' << medlab::detail::fmt(p.mean[k]) << ','
         << medlab::detail::fmt(p.stderr_[k]) << '\n';
      mean.points.emplace_back(i, p.mean[k]);
      clean.points.emplace_back(i, truth[k]);
    }
  } else {
    os << "row,col,truth,mean,stderr\n";
    for (int y = 1; y <= n; ++y) {
      for (int x = 1; x <= n; ++x) {
        std::size_t k = truth.offset({y, x});
        os << y << ',' << x << ',' << medlab::detail::fmt(truth[k]) << ',' << medlab::detail::fmt(p.mean[k]) << ','
           << medlab::detail::fmt(p.stderr_[k]) << '\n';
      }
    }
    int mid = (n + 1) / 2;
    for (int x = 1; x <= n; ++x) {
      mean.points.emplace_back(x, p.mean[truth.offset({mid, x})]);
      clean.points.emplace_back(x, truth[truth.offset({mid, x})]);
    }
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) worst = std::max(worst, std::abs(p.mean[k] - truth[k]));
  say << "profile " << filter_name(spec) << " n=" << n << ": max |E T - f| " << worst << '\n';
  maybe_svg(c, "expected filter output", {clean, mean}, false, false);
  return 0;
}

inline int cmd_crossover(const ExperimentConfig& c, std::ostream& say) {
  Resolved r = resolve(c);
  if (r.worst_over.size() > 1) throw ConfigError("--phantom step-family only applies to rates and sweep");
  if (c.ns.empty()) throw ConfigError("crossover needs --n values");
  if (c.reps < 2) throw ConfigError("--reps must be at least 2");
  auto schedule = parse_schedule(c.schedule, c.sigma);
  for (int n : c.ns) {
    double s = schedule(n);
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("--schedule gives an invalid sigma");
  }
  RiskConfig cfg = risk_config(c, r, c.ns.front());
  CrossoverResult res = crossover_experiment(c.ns, schedule, cfg, {c.stop_ratio, 2});

  std::ofstream file;
  std::ostream& os = open_out(c.out, file);
  if (c.dump_config) os << describe(c) << '\n';
  os << kRiskCsvHeader << '\n';
  Series ratio{"median/linear", {}};
  for (const auto& row : res.rows) {
    RiskReport meta;
    meta.phantom = r.phantom.name();
    meta.model = std::string(r.model.name());
    meta.dim = r.phantom.dim();
    meta.n = row.n;
    meta.sigma = row.sigma;
    write_risk_row(os, label(c), meta, row.linear);
    write_risk_row(os, label(c), meta, row.median);
    ratio.points.emplace_back(row.n, row.ratio);
  }
  if (!c.out.empty() && c.out != "-") {
    std::ofstream ratio_file(companion(c.out, "_ratio"));
    if (!ratio_file) throw std::runtime_error("cannot open ratio file");
    ratio_file << "experiment,n,sigma,linear_mse,median_mse,ratio,ratio_se\n";
    for (const auto& row : res.rows) {
      using medlab::detail::fmt;
      ratio_file << label(c) << ',' << row.n << ',' << fmt(row.sigma) << ',' << fmt(row.linear.mse) << ','
                 << fmt(row.median.mse) << ',' << fmt(row.ratio) << ',' << fmt(row.ratio_se) << '\n';
    }
  }
  say << "crossover: ratio " << res.rows.front().ratio << " at n=" << res.rows.front().n << " -> "
      << res.rows.back().ratio << " at n=" << res.rows.back().n;
  if (res.schedule_warning) say << " (warning: sigma_n * n does not grow on this ladder)";
  say << '\n';
  maybe_svg(c, "median/linear min-risk ratio", {ratio}, true, false);
  return 0;
}

inline int cmd_denoise(const ExperimentConfig& c, std::ostream& say) {
  Resolved r = resolve(c);
  if (c.in.empty()) throw ConfigError("denoise needs --in");
  FilterSpec spec = single_spec(c, r);
  std::ifstream in(c.in);
  if (!in) throw ConfigError("--in: cannot open '" + c.in + "'");
  std::optional<GridSample> parsed;
  try {
    parsed.emplace(read_csv(in));
  } catch (const std::exception& e) {
    throw ConfigError("--in: " + std::string(e.what()));
  }
  const GridSample& input = *parsed;
  check_layouts({spec}, input.n());
  GridSample out = apply_filter(spec, input);
  std::ofstream file;
  std::ostream& os = open_out(c.out, file);
  write_csv(os, out);
  say << "denoise " << filter_name(spec) << ": " << out.size() << " samples\n";
  return 0;
}

// Oracle flags shared by the oracle operations.
struct OracleArgs {
  std::string op;
  std::string model = "gaussian";
  double zeta = 0.0;
  double sigma = 0.5;
  int m = 101;
  double p = 0.5;
  double x = 0.0;
  double eps = 0.2;
  double delta = 5.0;
  int n_good = 80;
  int m_bad = 20;
  int reps = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

inline NoiseModel oracle_model(const OracleArgs& a) {
  try {
    return model_by_name(a.model);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--model: ") + e.what());
  }
}

inline int cmd_oracle(const OracleArgs& a, std::ostream& say) {
  auto g = [](double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
  };
  auto mc = [&](const McEstimate& e) {
    say << g(e.estimate) << ',' << g(e.std_error) << ',' << e.reps << ',' << e.seed << '\n';
  };
  auto guard = [](auto&& fn) {
    try {
      return fn();
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
  };
  if (a.op == "alpha") {
    double v = guard([&] { return alpha_of_zeta(a.zeta); });
    say << g(v) << '\n';
  } else if (a.op == "nu") {
    double v = guard([&] { return nu_n(a.zeta, a.sigma); });
    say << g(v) << '\n';
  } else if (a.op == "median-moment") {
    NoiseModel model = oracle_model(a);
    if (a.m < 1 || a.m % 2 == 0 || a.reps < 1000) throw ConfigError("median-moment needs odd --m and --reps >= 1000");
    mc(median_second_moment_mc(model, a.m, a.reps, a.seed, a.threads));
  } else if (a.op == "quantile-moment") {
    NoiseModel model = oracle_model(a);
    double alpha = guard([&] { return alpha_of_zeta(model.zeta()); });
    if (a.m < 1 || !(a.p > 2 * alpha / a.m && a.p < 1 - 2 * alpha / a.m) || a.reps < 2) {
      throw ConfigError("quantile-moment needs --p in (2 alpha/m, 1 - 2 alpha/m) and --reps >= 2");
    }
    QuantileMoment q = quantile_second_moment_mc(model, a.m, a.p, a.reps, a.seed, a.threads);
    say << g(q.moment.estimate) << ',' << g(q.moment.std_error) << ',' << q.moment.reps << ',' << q.moment.seed << ','
        << g(q.ratio) << ',' << g(q.alpha) << '\n';
  } else if (a.op == "repeated-median-cdf") {
    NoiseModel model = oracle_model(a);
    if (a.m < 0) throw ConfigError("--m must be nonnegative");
    say << g(repeated_median_cdf(model, a.m, a.x)) << '\n';
  } else if (a.op == "contaminated-median") {
    NoiseModel model = oracle_model(a);
    double v = guard([&] { return population_contaminated_median(a.eps, a.delta, model); });
    say << g(v) << '\n';
  } else if (a.op == "contaminated-sample") {
    NoiseModel model = oracle_model(a);
    if (a.n_good < 0 || a.m_bad < 0 || a.n_good + a.m_bad < 1) throw ConfigError("need --n-good + --m-bad >= 1");
    say << g(contaminated_median_sample(a.n_good, a.m_bad, a.delta, model, a.seed)) << '\n';
  } else {
    throw ConfigError("oracle: unknown operation '" + a.op + "'");
  }
  return 0;
}

inline void add_common(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--filter", c.filter, "filter: linear | median | two-scale | chain:<h1,h2,...> (widths as fractions of [0,1])");
  sub->add_option("--phantom", c.phantom, "phantom: step | step:<t> | step-family | disc | square | random1d:<seed> | random2d:<seed>");
  sub->add_option("--model", c.model, "noise model: gaussian | laplace | cauchy | uniform");
  sub->add_option("--dim", c.dim, "grid dimension 1 or 2 (checked against the phantom)");
  sub->add_option("--sigma", c.sigma, "noise level sigma (same units as the signal, which lies in [0,1])");
  sub->add_option("--reps", c.reps, "Monte Carlo replicates (count)");
  sub->add_option("--seed", c.seed, "experiment seed (integer)");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores); results do not depend on it");
  sub->add_option("--out", c.out, "output CSV path (default stdout)");
  sub->add_option("--svg", c.svg, "optional SVG plot path");
  sub->add_option("--experiment", c.experiment, "label for the experiment column (default: subcommand)");
  sub->add_flag("--dump-config", c.dump_config, "echo the resolved configuration as a comment line atop the CSV");
}

inline void add_widths(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--h", c.h, "window half-width(s) h as fractions of [0,1]; comma separated")->delimiter(',');
  sub->add_option("--h1", c.h1, "two-scale block width(s) h1 as fractions of [0,1]")->delimiter(',');
  sub->add_option("--h2", c.h2, "two-scale coarse window width(s) h2 as fractions of [0,1]")->delimiter(',');
}

}  // namespace detail

/// Parses argv and runs one subcommand. Returns 0 on success, 2 on a
/// configuration error and 1 on a runtime failure.
inline int run(int argc, const char* const* argv, std::ostream& say = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Median and linear filter risk experiments"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  ExperimentConfig c;
  OracleArgs oracle;

  auto* rates = app.add_subcommand("rates", "min-over-h risk across an n ladder and its fitted log-log slope");
  add_common(rates, c);
  add_widths(rates, c);
  rates->add_option("--n", c.ns, "grid sizes per side (comma separated, at least three)")->delimiter(',')->required();
  rates->add_option("--stop-ratio", c.stop_ratio, "stop a sweep once risks exceed this multiple of the best (0 = off)");

  auto* sweep = app.add_subcommand("sweep", "risk over a grid of window widths at one n");
  add_common(sweep, c);
  add_widths(sweep, c);
  sweep->add_option("--n", c.ns, "grid size per side")->required();
  sweep->add_option("--stop-ratio", c.stop_ratio, "stop once risks exceed this multiple of the best (0 = off)");

  auto* profile = app.add_subcommand("profile", "expected filter output at every grid point");
  add_common(profile, c);
  add_widths(profile, c);
  profile->add_option("--n", c.ns, "grid size per side")->required();

  auto* cross = app.add_subcommand("crossover", "median/linear min-risk ratio along an n ladder with sigma = schedule(n)");
  add_common(cross, c);
  cross->add_option("--n", c.ns, "grid sizes per side (comma separated)")->delimiter(',')->required();
  cross->add_option("--schedule", c.schedule, "sigma schedule: const:<s> or power:<c>,<a> for c n^-a (default: --sigma)");
  cross->add_option("--stop-ratio", c.stop_ratio, "stop sweeps once risks exceed this multiple of the best (0 = off)");

  auto* denoise = app.add_subcommand("denoise", "filter a grid sample read from CSV");
  add_common(denoise, c);
  add_widths(denoise, c);
  denoise->add_option("--in", c.in, "input grid CSV")->required();

  auto* orc = app.add_subcommand("oracle", "closed forms and Monte Carlo oracles, printed as one CSV line");
  orc->add_option("op", oracle.op,
                  "alpha | nu | median-moment | quantile-moment | repeated-median-cdf | contaminated-median | "
                  "contaminated-sample")
      ->required();
  orc->add_option("--model", oracle.model, "noise model: gaussian | laplace | cauchy | uniform");
  orc->add_option("--zeta", oracle.zeta, "tail decay exponent zeta (> 1; inf allowed)");
  orc->add_option("--sigma", oracle.sigma, "noise level in (0,1) for nu");
  orc->add_option("--m", oracle.m, "sample size m (count); repeated-median order for repeated-median-cdf");
  orc->add_option("--p", oracle.p, "quantile level p in (0,1)");
  orc->add_option("--x", oracle.x, "evaluation point x (noise units)");
  orc->add_option("--eps", oracle.eps, "contamination fraction in [0, 1/2)");
  orc->add_option("--delta", oracle.delta, "contamination shift Delta (noise units)");
  orc->add_option("--n-good", oracle.n_good, "clean draws (count)");
  orc->add_option("--m-bad", oracle.m_bad, "shifted draws (count)");
  orc->add_option("--reps", oracle.reps, "Monte Carlo replicates (count)");
  orc->add_option("--seed", oracle.seed, "seed (integer)");
  orc->add_option("--threads", oracle.threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    say << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    say << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  auto* chosen = app.get_subcommands().front();
  c.subcommand = chosen->get_name();
  // With the CSV on stdout the summary line goes to the error stream.
  std::ostream& summary = (chosen != orc && (c.out.empty() || c.out == "-")) ? err : say;
  try {
    if (chosen == rates) return cmd_rates(c, summary);
    if (chosen == sweep) return cmd_sweep(c, summary);
    if (chosen == profile) return cmd_profile(c, summary);
    if (chosen == cross) return cmd_crossover(c, summary);
    if (chosen == denoise) return cmd_denoise(c, summary);
    return cmd_oracle(oracle, say);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace medlab::cli
