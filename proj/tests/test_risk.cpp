#include <gtest/gtest.h>

#include <cmath>

#include "medlab/risk.hpp"

using namespace medlab;

namespace {

RiskConfig config(Phantom ph, double sigma, int n, int reps, std::uint64_t seed = 7) {
  RiskConfig c{std::move(ph), NoiseModel(NoiseKind::Gaussian), sigma, n, reps, seed, 0};
  return c;
}

}  // namespace

TEST(Risk, NoiselessMedianPreservesStep) {
  auto cfg = config(canonical_step(), 0.0, 512, 2);
  for (double h : default_h_grid(512)) {
    auto rec = estimate_risk(cfg, MedianSpec{h});
    EXPECT_EQ(rec.mse, 0.0) << h;
    EXPECT_EQ(rec.bias_sq, 0.0);
    EXPECT_EQ(rec.var, 0.0);
  }
}

TEST(Risk, NoiselessLinearOnConstant) {
  auto cfg = config(constant_phantom(0.5), 0.0, 300, 2);
  for (double h : {0.01, 0.1, 0.25}) EXPECT_EQ(estimate_risk(cfg, LinearSpec{h}).mse, 0.0);
}

TEST(Risk, NoiselessTwoScaleOnAlignedStep) {
  // n = 512, b = 8: a jump at 257/512 lies between fine samples 256 and 257,
  // the boundary of blocks 32 and 33.
  auto cfg = config(step_phantom(256.5 / 512, "step"), 0.0, 512, 2);
  for (double h2 : {0.1, 0.2, 0.3}) EXPECT_EQ(estimate_risk(cfg, TwoScaleSpec{8.0 / 512, h2}).mse, 0.0);
}

TEST(Risk, IdentityFilterIsNoiseVariance) {
  for (const char* name : {"step", "disc"}) {
    Phantom ph = phantom_by_name(name);
    int n = ph.dim() == 1 ? 1000 : 40;
    auto cfg = config(ph, 1.0, n, 400);
    for (FilterSpec s : {FilterSpec(MedianSpec{0.5 / n}), FilterSpec(LinearSpec{0.5 / n})}) {
      auto rec = estimate_risk(cfg, s);
      EXPECT_NEAR(rec.mse, 1.0, 3 * rec.mse_se) << name;
    }
  }
}

TEST(Risk, ThreadCountDoesNotMatter) {
  for (const char* name : {"step", "disc"}) {
    Phantom ph = phantom_by_name(name);
    int n = ph.dim() == 1 ? 512 : 48;
    std::vector<FilterSpec> specs{LinearSpec{0.05}, MedianSpec{0.05}, TwoScaleSpec{0.04, 0.15}};
    for (const auto& s : specs) {
      auto cfg = config(ph, 1.0, n, 23, 99);
      cfg.threads = 1;
      auto base = estimate_risk(cfg, s);
      for (unsigned t : {2u, 3u, 8u}) {
        cfg.threads = t;
        auto rec = estimate_risk(cfg, s);
        EXPECT_EQ(rec.mse, base.mse);
        EXPECT_EQ(rec.mse_se, base.mse_se);
        EXPECT_EQ(rec.bias_sq, base.bias_sq);
        EXPECT_EQ(rec.var, base.var);
      }
    }
  }
}

TEST(Risk, Decomposition) {
  for (const char* name : {"step", "random1d:3", "disc"}) {
    Phantom ph = phantom_by_name(name);
    int n = ph.dim() == 1 ? 700 : 40;
    auto cfg = config(ph, 0.8, n, 60);
    for (const auto& s : family_grid("median", n)) {
      auto rec = estimate_risk(cfg, s);
      EXPECT_GE(rec.mse, 0.0);
      EXPECT_LE(std::abs(rec.mse - rec.bias_sq - rec.var), 4 * rec.combined_se());
      EXPECT_NEAR(rec.mse, rec.bias_sq + rec.var, 1e-12 * (1 + rec.mse));
    }
  }
}

TEST(Risk, SquaredStderrHalvesWithDoubledReps) {
  // The standard error scales as reps^(-1/2): doubling reps halves its square.
  Engine eng = make_engine(5, 0);
  for (int k = 0; k < 10; ++k) {
    int n = 128 + int(eng() % 400);
    double h = 2.0 / n + open_unit(eng) * 0.1;
    double sigma = 0.3 + open_unit(eng);
    FilterSpec s = k % 2 ? FilterSpec(MedianSpec{h}) : FilterSpec(LinearSpec{h});
    auto small = estimate_risk(config(canonical_step(), sigma, n, 400, 100 + k), s);
    auto large = estimate_risk(config(canonical_step(), sigma, n, 800, 100 + k), s);
    double ratio = (small.mse_se * small.mse_se) / (large.mse_se * large.mse_se);
    EXPECT_NEAR(ratio, 2.0, 0.4) << k;
  }
}

TEST(Profile, NoiselessEqualsFilterOutput) {
  auto cfg = config(canonical_step(), 0.0, 256, 1000);
  for (FilterSpec s : {FilterSpec(LinearSpec{0.1}), FilterSpec(MedianSpec{0.1})}) {
    auto p = bias_profile(cfg, s);
    EXPECT_EQ(p.mean, apply_filter(s, canonical_step().sample(256)).values());
  }
}

TEST(Profile, LinearWindowFraction) {
  auto cfg = config(canonical_step(), 1.0, 512, 1000);
  auto p = bias_profile(cfg, LinearSpec{0.125});
  EXPECT_NEAR(p.mean[223], 33.0 / 129.0, 4 * p.stderr_[223]);
}

TEST(Grid, GeometricGrids) {
  auto g = default_h_grid(512);
  EXPECT_EQ(g.front(), 1.0 / 512);
  EXPECT_LE(g.back(), 0.25 * (1 + 1e-12));
  EXPECT_GT(g.back() * std::numbers::sqrt2, 0.25);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_NEAR(g[k] / g[k - 1], std::numbers::sqrt2, 1e-12);
  for (const auto& s : two_scale_grid(512)) {
    EXPECT_LT(s.h1, s.h2);
    EXPECT_NO_THROW(BlockLayout(512, s.h1));
  }
  EXPECT_THROW(geometric_grid(0.0, 1.0), std::domain_error);
  EXPECT_THROW(family_grid("box", 64), std::invalid_argument);
}

TEST(RateFit, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (int n : {256, 512, 1024, 2048, 4096}) pts.emplace_back(n, 3.0 / std::sqrt(double(n)));
  auto fit = rate_fit(pts);
  EXPECT_NEAR(fit.slope, -0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(RateFit, ConstantAndErrors) {
  auto fit = rate_fit({{10, 2.0}, {20, 2.0}, {40, 2.0}});
  EXPECT_EQ(fit.slope, 0.0);
  EXPECT_THROW(rate_fit({{10, 1.0}, {20, 1.0}}), std::domain_error);
  EXPECT_THROW(rate_fit({{10, 1.0}, {20, 0.0}, {30, 1.0}}), std::domain_error);
  EXPECT_THROW(rate_fit({{10, 1.0}, {20, -1.0}, {30, 1.0}}), std::domain_error);
}

TEST(Sweep, RecordsSortedAndBest) {
  auto cfg = config(canonical_step(), 1.0, 512, 20);
  auto rep = sweep_h(cfg, family_grid("two-scale", 512));
  for (std::size_t k = 1; k < rep.records.size(); ++k) {
    const auto& a = rep.records[k - 1];
    const auto& b = rep.records[k];
    EXPECT_TRUE(a.h1 < b.h1 || (a.h1 == b.h1 && a.h2 < b.h2));
  }
  for (const auto& r : rep.records) EXPECT_GE(r.mse, rep.best().mse);
  EXPECT_FALSE(rep.truncated);
}

TEST(Sweep, FamilyIsWorstCase) {
  auto cfg = config(canonical_step(), 1.0, 256, 20);
  auto fam = step_family();
  ASSERT_EQ(fam.size(), 9u);
  auto specs = family_grid("median", 256);
  auto worst = sweep_family(cfg, fam, specs);
  for (const auto& ph : fam) {
    RiskConfig c = cfg;
    c.phantom = ph;
    auto one = sweep_h(c, specs);
    ASSERT_EQ(one.records.size(), worst.records.size());
    for (std::size_t k = 0; k < one.records.size(); ++k) EXPECT_LE(one.records[k].mse, worst.records[k].mse);
  }
}

TEST(Sweep, EarlyStopKeepsMinimum) {
  auto cfg = config(canonical_step(), 1.0, 1024, 30);
  auto full = sweep_h(cfg, family_grid("median", 1024));
  auto cut = sweep_h(cfg, family_grid("median", 1024), {3.0, 2});
  EXPECT_EQ(full.best().mse, cut.best().mse);
  EXPECT_LE(cut.records.size(), full.records.size());
}

TEST(Sweep, SingleScaleArgminNearRootN) {
  auto cfg = config(canonical_step(), 1.0, 4096, 200);
  for (const char* fam : {"linear", "median"}) {
    auto rep = sweep_h(cfg, family_grid(fam, 4096));
    double h = rep.best().h1;
    EXPECT_LE(std::max(h * 64, 1 / (h * 64)), 4.0) << fam << " h* = " << h;
    double at_quarter = std::numeric_limits<double>::infinity(), at_four = at_quarter;
    for (const auto& r : rep.records) {
      if (std::abs(r.h1 / h - 0.25) < 1e-9) at_quarter = r.mse;
      if (std::abs(r.h1 / h - 4.0) < 1e-9) at_four = r.mse;
    }
    EXPECT_LE(rep.best().mse, at_quarter);
    EXPECT_LE(rep.best().mse, at_four);
  }
}

TEST(Sweep, TwoScaleArgminNearTheory) {
  const int n = 4096;
  auto cfg = config(canonical_step(), 1.0, n, 100);
  auto rep = sweep_family(cfg, step_family(), family_grid("two-scale", n), {0.0, 2});
  const auto& best = rep.best();
  double f1 = best.h1 * std::pow(n, 2.0 / 3), f2 = best.h2 * std::pow(n, 1.0 / 3);
  EXPECT_LE(std::max(f1, 1 / f1), 4.0) << best.h1;
  EXPECT_LE(std::max(f2, 1 / f2), 4.0) << best.h2;
}

TEST(Crossover, ConstantSigmaRoughlyFlat) {
  auto cfg = config(canonical_step(), 1.0, 512, 100);
  auto res = crossover_experiment({512, 1024, 2048, 4096, 8192}, [](int) { return 1.0; }, cfg, {3.0, 2});
  double lo = 1e300, hi = 0.0;
  for (const auto& row : res.rows) {
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    EXPECT_GT(row.ratio_se, 0.0);
  }
  EXPECT_LT(hi / lo, 3.0);
  EXPECT_FALSE(res.schedule_warning);
}

TEST(Crossover, NoSmoothingRegime) {
  // sigma * n^(1/2) bounded: the linear filter cannot beat the identity.
  auto cfg = config(canonical_step(), 1.0, 512, 100);
  auto sched = [](int n) { return 0.5 / std::sqrt(double(n)); };
  auto res = crossover_experiment({512, 1024, 2048}, sched, cfg);
  for (const auto& row : res.rows) EXPECT_EQ(row.linear.h1, 1.0 / row.n) << row.n;
  EXPECT_FALSE(res.schedule_warning);
  auto flat = crossover_experiment({512, 1024, 2048}, [](int n) { return 4.0 / n; }, cfg);
  EXPECT_TRUE(flat.schedule_warning);
}
