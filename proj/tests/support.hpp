#pragma once

// Brute-force oracles and randomized property runners shared by the unit
// tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "medlab/filters.hpp"
#include "medlab/grid.hpp"
#include "medlab/quantile.hpp"
#include "medlab/rng.hpp"

namespace medlab::testing {

/// Window values gathered through window_indices.
inline std::vector<double> window_values(const GridSample& g, double h, GridIndex i) {
  std::vector<double> out;
  for (auto j : window_indices(g.n(), g.dim(), h, i)) out.push_back(g.at(j));
  return out;
}

inline std::vector<GridIndex> all_indices(int n, int dim) {
  std::vector<GridIndex> out;
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= (dim == 1 ? 1 : n); ++c) out.push_back({r, c});
  }
  return out;
}

/// Sorts the window and takes rank 1 + floor(m/2).
inline GridSample brute_median(const GridSample& g, double h) {
  std::vector<double> out(g.size());
  for (auto i : all_indices(g.n(), g.dim())) {
    auto v = window_values(g, h, i);
    std::sort(v.begin(), v.end());
    out[g.offset(i)] = v[v.size() / 2];
  }
  return GridSample(g.dim(), g.n(), out);
}

inline GridSample brute_linear(const GridSample& g, double h) {
  std::vector<double> out(g.size());
  for (auto i : all_indices(g.n(), g.dim())) {
    auto v = window_values(g, h, i);
    long double s = 0;
    for (double x : v) s += x;
    out[g.offset(i)] = double(s / (long double)(v.size()));
  }
  return GridSample(g.dim(), g.n(), out);
}

/// Block index (1-based) of fine index x for block side b and n1 blocks.
inline int brute_block(int x, int b, int n1) { return std::min((x - 1) / b, n1 - 1) + 1; }

/// Two-scale median built from explicit block lists.
inline GridSample brute_two_scale(const GridSample& g, double h1, double h2) {
  int n = g.n();
  int b = int(std::lround(n * h1));
  int n1 = n / b;
  std::vector<double> coarse(g.dim() == 1 ? std::size_t(n1) : std::size_t(n1) * std::size_t(n1));
  GridSample shape = GridSample::filled(g.dim(), n1, 0.0);
  for (auto k : all_indices(n1, g.dim())) {
    std::vector<double> v;
    for (auto i : all_indices(n, g.dim())) {
      bool in = brute_block(i.row, b, n1) == k.row && (g.dim() == 1 || brute_block(i.col, b, n1) == k.col);
      if (in) v.push_back(g.at(i));
    }
    std::sort(v.begin(), v.end());
    coarse[shape.offset(k)] = v[v.size() / 2];
  }
  GridSample c2 = brute_median(GridSample(g.dim(), n1, coarse), h2);
  std::vector<double> out(g.size());
  for (auto i : all_indices(n, g.dim())) {
    GridIndex k{brute_block(i.row, b, n1), g.dim() == 1 ? 1 : brute_block(i.col, b, n1)};
    out[g.offset(i)] = c2.at(k);
  }
  return GridSample(g.dim(), n, out);
}

enum class Kind { Linear, Median, TwoScale };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Linear: return "linear";
    case Kind::Median: return "median";
    case Kind::TwoScale: return "two-scale";
  }
  return "";
}

/// A random filter configuration and input pair.
struct Case {
  FilterSpec spec = LinearSpec{0.1};
  GridSample x;
  GridSample y;
};

inline double uniform(Engine& eng, double lo, double hi) { return lo + (hi - lo) * open_unit(eng); }

inline int uniform_int(Engine& eng, int lo, int hi) {
  return lo + int(eng() % std::uint64_t(hi - lo + 1));
}

// Random values; about a third of the inputs are coarsely quantized so that
// ties are common.
inline std::vector<double> random_values(Engine& eng, std::size_t size, bool ties) {
  std::vector<double> v(size);
  for (double& x : v) x = ties ? double(uniform_int(eng, -3, 3)) : uniform(eng, -5.0, 5.0);
  return v;
}

/// Draws a filter of `kind` and an input X of a random shape. Y is left empty.
inline Case random_case(Kind kind, Engine& eng) {
  int dim = uniform_int(eng, 1, 2);
  int n = dim == 1 ? uniform_int(eng, 6, 80) : uniform_int(eng, 6, 22);
  Case c;
  if (kind == Kind::TwoScale) {
    int b = uniform_int(eng, 1, n / 3);
    double h1 = (double(b) + uniform(eng, -0.4, 0.4)) / n;
    h1 = std::clamp(h1, 0.5 / n, 0.99);
    if (int(std::lround(n * h1)) != b) h1 = double(b) / n;
    double h2 = uniform(eng, h1 * 1.01, 0.95);
    c.spec = TwoScaleSpec{h1, h2};
  } else {
    double h = std::exp(uniform(eng, std::log(0.3 / n), std::log(0.7)));
    c.spec = kind == Kind::Linear ? FilterSpec(LinearSpec{h}) : FilterSpec(MedianSpec{h});
  }
  bool ties = uniform_int(eng, 0, 2) == 0;
  std::size_t size = dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
  c.x = GridSample(dim, n, random_values(eng, size, ties));
  return c;
}

// Rounding slack for the linear filter (prefix-sum averages); medians are exact.
inline double slack(Kind kind, const GridSample& a) {
  if (kind != Kind::Linear) return 0.0;
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return 1e-12 * (1.0 + m);
}

/// X <= Y pointwise implies F(X) <= F(Y) pointwise. Returns failures.
inline int check_monotone(Kind kind, int cases, std::uint64_t seed) {
  Engine eng = make_engine(seed, 100 + std::uint64_t(kind));
  int failures = 0;
  for (int t = 0; t < cases; ++t) {
    Case c = random_case(kind, eng);
    std::vector<double> y = c.x.values();
    for (double& v : y) v += uniform_int(eng, 0, 3) == 0 ? 0.0 : uniform(eng, 0.0, 2.0);
    GridSample ys(c.x.dim(), c.x.n(), y);
    auto fx = apply_filter(c.spec, c.x), fy = apply_filter(c.spec, ys);
    double tol = slack(kind, ys);
    for (std::size_t i = 0; i < fx.size(); ++i) {
      if (fx[i] > fy[i] + tol) {
        ++failures;
        break;
      }
    }
  }
  return failures;
}

/// ||F(X) - F(Y)||_inf <= ||X - Y||_inf.
inline int check_lipschitz(Kind kind, int cases, std::uint64_t seed) {
  Engine eng = make_engine(seed, 200 + std::uint64_t(kind));
  int failures = 0;
  for (int t = 0; t < cases; ++t) {
    Case c = random_case(kind, eng);
    std::vector<double> y = c.x.values();
    double scale = uniform(eng, 0.0, 3.0);
    for (double& v : y) v += uniform(eng, -scale, scale);
    GridSample ys(c.x.dim(), c.x.n(), y);
    double d_in = 0.0, d_out = 0.0;
    auto fx = apply_filter(c.spec, c.x), fy = apply_filter(c.spec, ys);
    for (std::size_t i = 0; i < fx.size(); ++i) {
      d_in = std::max(d_in, std::abs(c.x[i] - ys[i]));
      d_out = std::max(d_out, std::abs(fx[i] - fy[i]));
    }
    if (d_out > d_in + slack(kind, ys)) ++failures;
  }
  return failures;
}

/// F(aX + b) = a F(X) + b for a >= 0 (exact for the medians).
inline int check_affine(Kind kind, int cases, std::uint64_t seed) {
  Engine eng = make_engine(seed, 300 + std::uint64_t(kind));
  int failures = 0;
  for (int t = 0; t < cases; ++t) {
    Case c = random_case(kind, eng);
    double a = uniform_int(eng, 0, 9) == 0 ? 0.0 : uniform(eng, 0.0, 4.0);
    double b = uniform(eng, -10.0, 10.0);
    std::vector<double> y = c.x.values();
    for (double& v : y) v = a * v + b;
    GridSample ys(c.x.dim(), c.x.n(), y);
    auto fx = apply_filter(c.spec, c.x), fy = apply_filter(c.spec, ys);
    double tol = slack(kind, ys) * (1.0 + a);
    for (std::size_t i = 0; i < fx.size(); ++i) {
      if (std::abs(fy[i] - (a * fx[i] + b)) > tol) {
        ++failures;
        break;
      }
    }
  }
  return failures;
}

/// Every output lies within [min, max] of the inputs that fed it.
inline int check_range(Kind kind, int cases, std::uint64_t seed) {
  Engine eng = make_engine(seed, 400 + std::uint64_t(kind));
  int failures = 0;
  for (int t = 0; t < cases; ++t) {
    Case c = random_case(kind, eng);
    auto fx = apply_filter(c.spec, c.x);
    double tol = slack(kind, c.x);
    bool ok = true;
    for (auto i : all_indices(c.x.n(), c.x.dim())) {
      std::vector<double> feed;
      if (auto* s = std::get_if<TwoScaleSpec>(&c.spec)) {
        int n = c.x.n(), b = int(std::lround(n * s->h1)), n1 = n / b;
        GridIndex k{brute_block(i.row, b, n1), c.x.dim() == 1 ? 1 : brute_block(i.col, b, n1)};
        for (auto kk : window_indices(n1, c.x.dim(), s->h2, k)) {
          for (auto j : all_indices(n, c.x.dim())) {
            bool in = brute_block(j.row, b, n1) == kk.row && (c.x.dim() == 1 || brute_block(j.col, b, n1) == kk.col);
            if (in) feed.push_back(c.x.at(j));
          }
        }
      } else {
        feed = window_values(c.x, filter_widths(c.spec).first, i);
      }
      auto [lo, hi] = std::minmax_element(feed.begin(), feed.end());
      double v = fx.at(i);
      if (v < *lo - tol || v > *hi + tol) ok = false;
    }
    failures += !ok;
  }
  return failures;
}

/// Median of a window with n_g good and m_b < n_g bad values lies between
/// the good values' quantiles at (1/2 - eps)/(1 - eps) and (1/2)/(1 - eps).
inline int check_mixture_sandwich(int cases, std::uint64_t seed) {
  Engine eng = make_engine(seed, 500);
  int failures = 0;
  for (int t = 0; t < cases; ++t) {
    int n_good = uniform_int(eng, 1, 150);
    int m_bad = uniform_int(eng, 0, n_good - 1);
    bool ties = uniform_int(eng, 0, 2) == 0;
    auto good = random_values(eng, std::size_t(n_good), ties);
    auto bad = random_values(eng, std::size_t(m_bad), ties);
    double shift = uniform(eng, -20.0, 20.0);
    for (double& v : bad) v += shift;
    std::vector<double> all = good;
    all.insert(all.end(), bad.begin(), bad.end());
    double med = median(all);
    // With m = n_g + m_b the levels are (m/2 - m_b)/n_g and (m/2)/n_g, so
    // n_g p is rational and the ranks 1 + floor(n_g p) are formed exactly;
    // p rounded to a double can land just below an integer multiple.
    int m = n_good + m_bad;
    std::size_t lo_rank = std::size_t(1 + (m - 2 * m_bad) / 2), hi_rank = std::size_t(1 + m / 2);
    std::sort(good.begin(), good.end());
    double lo = good[lo_rank - 1], hi = good[hi_rank - 1];
    if (med < lo || med > hi) ++failures;
  }
  return failures;
}

}  // namespace medlab::testing
