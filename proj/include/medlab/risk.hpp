#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "medlab/filters.hpp"
#include "medlab/grid.hpp"
#include "medlab/noise.hpp"
#include "medlab/parallel.hpp"
#include "medlab/phantoms.hpp"
#include "medlab/rng.hpp"

namespace medlab {

/// Everything that fixes a Monte Carlo risk experiment except the filter.
struct RiskConfig {
  Phantom phantom;
  NoiseModel model{NoiseKind::Gaussian};
  double sigma = 1.0;
  int n = 512;
  int reps = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Monte Carlo risk of one filter at one (n, widths).
///
/// mse is the replicate mean of the grid-averaged squared error. bias_sq and
/// var split it through per-point replicate means and sample variances
/// (divisor reps - 1); bias_sq subtracts the var/reps excess of the plug-in
/// squared mean, so mse == bias_sq + var up to rounding. The bias_sq and var
/// standard errors treat grid points as independent.
struct RiskRecord {
  FilterSpec spec = LinearSpec{0.0};
  double h1 = 0.0;
  double h2 = std::numeric_limits<double>::quiet_NaN();
  double mse = 0.0;
  double mse_se = 0.0;
  double bias_sq = 0.0;
  double bias_sq_se = 0.0;
  double var = 0.0;
  double var_se = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;

  double combined_se() const { return std::sqrt(mse_se * mse_se + bias_sq_se * bias_sq_se + var_se * var_se); }
};

/// Per-point replicate mean of a filter output with its standard error.
struct Profile {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

namespace detail {

// Sums over replicates for one filter: per-point error sums, per-point
// squared error sums and the per-replicate grid-averaged squared error.
struct Accumulation {
  std::vector<double> sum;
  std::vector<double> sum_sq;
  std::vector<double> rep_mse;
};

inline constexpr int kRepBlock = 4;

// Runs every spec on the same noisy replicates. Replicate r uses stream r of
// the seed; blocks of kRepBlock replicates are reduced in block order, so
// results do not depend on the thread count. Errors are taken against
// `center` when given (one spec only), else against the truth.
inline std::vector<Accumulation> accumulate(const RiskConfig& cfg, const std::vector<FilterSpec>& specs,
                                            const GridSample* center = nullptr) {
  if (cfg.reps < 2) throw std::domain_error("risk estimation needs at least two replicates");
  const GridSample truth = cfg.phantom.sample(cfg.n);
  const GridSample& ref = center ? *center : truth;
  const std::size_t points = truth.size();
  const std::size_t groups = specs.size();
  std::vector<Accumulation> acc(groups);
  for (auto& a : acc) {
    a.sum.assign(points, 0.0);
    a.sum_sq.assign(points, 0.0);
    a.rep_mse.assign(std::size_t(cfg.reps), 0.0);
  }

  const int blocks = (cfg.reps + kRepBlock - 1) / kRepBlock;
  unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
  const int wave = int(std::max(1u, threads));
  std::vector<std::vector<Accumulation>> slots(static_cast<std::size_t>(wave));

  for (int first = 0; first < blocks; first += wave) {
    int count = std::min(wave, blocks - first);
    parallel_for(std::size_t(count), threads, [&](std::size_t slot) {
      int block = first + int(slot);
      auto& part = slots[slot];
      part.assign(groups, {});
      for (auto& a : part) {
        a.sum.assign(points, 0.0);
        a.sum_sq.assign(points, 0.0);
      }
      for (int r = block * kRepBlock; r < std::min(cfg.reps, (block + 1) * kRepBlock); ++r) {
        GridSample noisy = add_noise(truth, cfg.model, cfg.sigma, cfg.seed, std::uint64_t(r));
        FilterBank bank(noisy);
        for (std::size_t g = 0; g < groups; ++g) {
          GridSample out = bank.apply(specs[g]);
          auto& a = part[g];
          double total = 0.0;
          for (std::size_t i = 0; i < points; ++i) {
            double e = out[i] - ref[i];
            a.sum[i] += e;
            a.sum_sq[i] += e * e;
            total += e * e;
          }
          a.rep_mse.push_back(total / double(points));
        }
      }
    });
    for (int slot = 0; slot < count; ++slot) {
      int block = first + slot;
      for (std::size_t g = 0; g < groups; ++g) {
        const auto& part = slots[std::size_t(slot)][g];
        auto& a = acc[g];
        for (std::size_t i = 0; i < points; ++i) {
          a.sum[i] += part.sum[i];
          a.sum_sq[i] += part.sum_sq[i];
        }
        for (std::size_t k = 0; k < part.rep_mse.size(); ++k) {
          a.rep_mse[std::size_t(block * kRepBlock) + k] = part.rep_mse[k];
        }
      }
    }
  }
  return acc;
}

inline RiskRecord summarize(const RiskConfig& cfg, const FilterSpec& spec, const Accumulation& a) {
  RiskRecord rec;
  rec.spec = spec;
  std::tie(rec.h1, rec.h2) = filter_widths(spec);
  rec.reps = cfg.reps;
  rec.seed = cfg.seed;
  const double reps = double(cfg.reps);
  const double points = double(a.sum.size());

  double mse_sum = 0.0;
  for (double m : a.rep_mse) mse_sum += m;
  rec.mse = mse_sum / reps;
  double ss = 0.0;
  for (double m : a.rep_mse) ss += (m - rec.mse) * (m - rec.mse);
  rec.mse_se = std::sqrt(ss / (reps - 1.0) / reps);

  double bias = 0.0, var = 0.0, bias_var = 0.0, var_var = 0.0;
  for (std::size_t i = 0; i < a.sum.size(); ++i) {
    double mean = a.sum[i] / reps;
    double v = std::max(0.0, (a.sum_sq[i] - reps * mean * mean) / (reps - 1.0));
    bias += mean * mean - v / reps;
    var += v;
    bias_var += 4.0 * mean * mean * v / reps;
    var_var += 2.0 * v * v / (reps - 1.0);
  }
  rec.bias_sq = bias / points;
  rec.var = var / points;
  rec.bias_sq_se = std::sqrt(bias_var) / points;
  rec.var_se = std::sqrt(var_var) / points;
  return rec;
}

}  // namespace detail

/// R_n(T; f) for one filter by Monte Carlo.
inline RiskRecord estimate_risk(const RiskConfig& cfg, const FilterSpec& spec) {
  auto acc = detail::accumulate(cfg, {spec});
  return detail::summarize(cfg, spec, acc.front());
}

/// Replicate mean E[T(i)] for every grid point.
inline Profile bias_profile(const RiskConfig& cfg, const FilterSpec& spec) {
  const GridSample truth = cfg.phantom.sample(cfg.n);
  // Centered on replicate 0's output, so identical outputs average exactly.
  const GridSample center = apply_filter(spec, add_noise(truth, cfg.model, cfg.sigma, cfg.seed, 0));
  auto acc = detail::accumulate(cfg, {spec}, &center).front();
  const double reps = double(cfg.reps);
  Profile p;
  p.mean.resize(truth.size());
  p.stderr_.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    double mean = acc.sum[i] / reps;
    double v = std::max(0.0, (acc.sum_sq[i] - reps * mean * mean) / (reps - 1.0));
    p.mean[i] = center[i] + mean;
    p.stderr_[i] = std::sqrt(v / reps);
  }
  return p;
}

/// lo, lo*ratio, lo*ratio^2, ... up to hi.
inline std::vector<double> geometric_grid(double lo, double hi, double ratio = std::numbers::sqrt2) {
  if (!(lo > 0.0 && hi >= lo && ratio > 1.0)) throw std::domain_error("geometric grid needs 0 < lo <= hi, ratio > 1");
  std::vector<double> out;
  for (double h = lo; h <= hi * (1.0 + 1e-12); h *= ratio) out.push_back(h);
  return out;
}

/// sqrt(2)-geometric widths spanning [1/n, 1/4].
inline std::vector<double> default_h_grid(int n) { return geometric_grid(1.0 / n, 0.25); }

/// Pairs h1 < h2 from the default grid whose block layout is valid.
inline std::vector<TwoScaleSpec> two_scale_grid(int n) {
  auto grid = default_h_grid(n);
  std::vector<TwoScaleSpec> out;
  for (double h1 : grid) {
    int block = int(std::lround(n * h1));
    if (block < 1 || n / block < 3) continue;
    for (double h2 : grid) {
      if (h2 > h1 * (1.0 + 1e-12)) out.push_back({h1, h2});
    }
  }
  return out;
}

struct SweepOptions {
  /// Stop once this many consecutive width groups all exceed
  /// stop_ratio * (best risk so far). 0 disables early stopping.
  double stop_ratio = 0.0;
  int patience = 2;
};

/// One filter family swept over widths at fixed (phantom, model, sigma, n).
struct RiskReport {
  std::string filter;
  std::string phantom;
  std::string model;
  int dim = 1;
  int n = 0;
  double sigma = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<RiskRecord> records;  // sorted by (h1, h2)
  bool truncated = false;

  const RiskRecord& best() const {
    if (records.empty()) throw std::logic_error("empty risk report");
    return *std::min_element(records.begin(), records.end(),
                             [](const RiskRecord& a, const RiskRecord& b) { return a.mse < b.mse; });
  }
};

/// Risk for every candidate spec, maximized over a family of phantoms that
/// share dimension and noise settings. Two-scale candidates sharing h1 are
/// evaluated together; groups run in increasing primary width so that
/// early stopping can cut off the wide end of the grid.
inline RiskReport sweep_family(const RiskConfig& cfg, const std::vector<Phantom>& phantoms,
                               std::vector<FilterSpec> specs, SweepOptions opt = {}) {
  if (specs.empty()) throw std::domain_error("sweep needs at least one width");
  if (phantoms.empty()) throw std::domain_error("sweep needs at least one phantom");
  for (const auto& ph : phantoms) {
    if (ph.dim() != phantoms.front().dim()) throw std::domain_error("phantom family mixes dimensions");
  }
  std::sort(specs.begin(), specs.end(), [](const FilterSpec& a, const FilterSpec& b) {
    auto wa = filter_widths(a), wb = filter_widths(b);
    if (wa.first != wb.first) return wa.first < wb.first;
    return wa.second < wb.second;
  });
  std::vector<std::vector<FilterSpec>> groups;
  for (const auto& s : specs) {
    bool join = !groups.empty() && std::holds_alternative<TwoScaleSpec>(s) &&
                std::holds_alternative<TwoScaleSpec>(groups.back().front()) &&
                filter_widths(groups.back().front()).first == filter_widths(s).first;
    if (join) {
      groups.back().push_back(s);
    } else {
      groups.push_back({s});
    }
  }

  RiskReport report;
  report.filter = filter_name(specs.front());
  report.phantom = phantoms.front().name();
  if (phantoms.size() > 1) report.phantom = "max:" + std::to_string(phantoms.size());
  report.model = std::string(cfg.model.name());
  report.dim = phantoms.front().dim();
  report.n = cfg.n;
  report.sigma = cfg.sigma;
  report.reps = cfg.reps;
  report.seed = cfg.seed;

  double best = std::numeric_limits<double>::infinity();
  int worse_streak = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<RiskRecord> worst;
    for (const auto& ph : phantoms) {
      RiskConfig c = cfg;
      c.phantom = ph;
      auto acc = detail::accumulate(c, groups[g]);
      for (std::size_t k = 0; k < groups[g].size(); ++k) {
        auto rec = detail::summarize(c, groups[g][k], acc[k]);
        if (worst.size() <= k) {
          worst.push_back(rec);
        } else if (rec.mse > worst[k].mse) {
          worst[k] = rec;
        }
      }
    }
    double group_best = std::numeric_limits<double>::infinity();
    for (const auto& rec : worst) {
      report.records.push_back(rec);
      group_best = std::min(group_best, rec.mse);
    }
    if (opt.stop_ratio > 0.0) {
      worse_streak = group_best > opt.stop_ratio * std::min(best, group_best) ? worse_streak + 1 : 0;
      best = std::min(best, group_best);
      if (worse_streak >= opt.patience && g + 1 < groups.size()) {
        report.truncated = true;
        break;
      }
    }
  }
  return report;
}

inline RiskReport sweep_h(const RiskConfig& cfg, std::vector<FilterSpec> specs, SweepOptions opt = {}) {
  return sweep_family(cfg, {cfg.phantom}, std::move(specs), opt);
}

/// The canonical step plus eight steps at quasi-random locations in
/// [0.3, 0.7], so that no single location is aligned with every block grid.
inline std::vector<Phantom> step_family() {
  std::vector<Phantom> out{Phantom(canonical_step())};
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int k = 0; k < 8; ++k) {
    double frac = (k + 1) * phi - std::floor((k + 1) * phi);
    double t = 0.3 + 0.4 * frac;
    std::ostringstream name;
    name << "step:" << std::setprecision(17) << t;
    out.emplace_back(step_phantom(t, name.str()));
  }
  return out;
}

/// Candidate specs of one family over the default grids.
inline std::vector<FilterSpec> family_grid(const std::string& family, int n) {
  std::vector<FilterSpec> out;
  if (family == "linear") {
    for (double h : default_h_grid(n)) out.push_back(LinearSpec{h});
  } else if (family == "median") {
    for (double h : default_h_grid(n)) out.push_back(MedianSpec{h});
  } else if (family == "two-scale") {
    for (const auto& s : two_scale_grid(n)) out.push_back(s);
  } else {
    throw std::invalid_argument("no default width grid for filter family '" + family + "'");
  }
  return out;
}

/// Least-squares fit of log(risk) on log(n).
struct RateFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::domain_error("rate fit needs at least three points");
  double sx = 0.0, sy = 0.0;
  for (auto [n, risk] : points) {
    if (!(n > 0.0)) throw std::domain_error("rate fit needs positive n");
    if (!(risk > 0.0)) throw std::domain_error("rate fit needs positive risks");
    sx += std::log(n);
    sy += std::log(risk);
  }
  double k = double(points.size());
  double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (auto [n, risk] : points) {
    double dx = std::log(n) - mx, dy = std::log(risk) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::domain_error("rate fit needs at least two distinct n");
  RateFit fit;
  fit.points = points;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

/// Minimal risk over widths for each n of a ladder, and the fitted rate.
struct RateExperiment {
  std::vector<RiskReport> reports;
  RateFit fit;
};

/// With a nonempty `phantoms` the risk at each width is the worst case over
/// that family instead of cfg.phantom alone.
inline RateExperiment rate_experiment(RiskConfig cfg, const std::string& family, const std::vector<int>& ladder,
                                      SweepOptions opt = {}, const std::vector<Phantom>& phantoms = {}) {
  RateExperiment out;
  std::vector<std::pair<double, double>> points;
  for (int n : ladder) {
    cfg.n = n;
    out.reports.push_back(phantoms.empty() ? sweep_h(cfg, family_grid(family, n), opt)
                                           : sweep_family(cfg, phantoms, family_grid(family, n), opt));
    points.emplace_back(double(n), out.reports.back().best().mse);
  }
  out.fit = rate_fit(points);
  return out;
}

struct CrossoverRow {
  int n = 0;
  double sigma = 0.0;
  RiskRecord linear;
  RiskRecord median;
  double ratio = 0.0;
  double ratio_se = 0.0;
};

struct CrossoverResult {
  std::vector<CrossoverRow> rows;
  /// sigma_n * n did not grow across the ladder.
  bool schedule_warning = false;
};

/// Best linear and median risks along a ladder with sigma = schedule(n).
inline CrossoverResult crossover_experiment(const std::vector<int>& ladder, const std::function<double(int)>& schedule,
                                            RiskConfig cfg, SweepOptions opt = {}) {
  if (ladder.empty()) throw std::domain_error("crossover needs a nonempty ladder");
  CrossoverResult out;
  for (int n : ladder) {
    cfg.n = n;
    cfg.sigma = schedule(n);
    CrossoverRow row;
    row.n = n;
    row.sigma = cfg.sigma;
    row.linear = sweep_h(cfg, family_grid("linear", n), opt).best();
    row.median = sweep_h(cfg, family_grid("median", n), opt).best();
    row.ratio = row.median.mse / row.linear.mse;
    double rel_m = row.median.mse_se / row.median.mse, rel_l = row.linear.mse_se / row.linear.mse;
    row.ratio_se = row.ratio * std::sqrt(rel_m * rel_m + rel_l * rel_l);
    out.rows.push_back(row);
  }
  const auto& a = out.rows.front();
  const auto& b = out.rows.back();
  out.schedule_warning = !(b.sigma * b.n > a.sigma * a.n);
  return out;
}

}  // namespace medlab
