#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "medlab/grid.hpp"
#include "medlab/noise.hpp"
#include "medlab/phantoms.hpp"

using namespace medlab;

namespace {

std::set<GridIndex> as_set(const std::vector<GridIndex>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Window, SymmetricInterior1D) {
  auto w = window_indices(10, 1, 0.2, {5, 1});
  std::set<GridIndex> want{{3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}};
  EXPECT_EQ(as_set(w), want);
}

TEST(Window, ClippedAtBoundary) {
  auto w = window_indices(10, 1, 0.2, {1, 1});
  std::set<GridIndex> want{{1, 1}, {2, 1}, {3, 1}};
  EXPECT_EQ(as_set(w), want);
}

TEST(Window, EuclideanUnitDisc) {
  auto w = window_indices(10, 2, 0.1, {5, 5});
  std::set<GridIndex> want{{5, 5}, {4, 5}, {6, 5}, {5, 4}, {5, 6}};
  EXPECT_EQ(as_set(w), want);
}

TEST(Window, RejectsBadArguments) {
  EXPECT_THROW(window_indices(10, 1, 0.2, {0, 1}), std::domain_error);
  EXPECT_THROW(window_indices(10, 1, 0.2, {11, 1}), std::domain_error);
  EXPECT_THROW(window_indices(10, 2, 0.2, {3, 11}), std::domain_error);
  EXPECT_THROW(window_indices(10, 1, 0.0, {3, 1}), std::domain_error);
  EXPECT_THROW(window_indices(10, 1, 1.0, {3, 1}), std::domain_error);
}

TEST(Window, TinyWidthIsIdentityWindow) {
  auto w = window_indices(10, 2, 0.05, {4, 7});
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w.front(), (GridIndex{4, 7}));
}

TEST(Window, ExactRadiusDespiteRounding) {
  for (int n : {7, 10, 33, 100, 1000}) {
    for (int k : {1, 2, 3, 5}) {
      EXPECT_EQ(WindowSpec(n, 1, double(k) / n).radius(), k) << n << " " << k;
    }
  }
}

TEST(Window, ContainsCenterAndStaysInGrid) {
  for (int dim : {1, 2}) {
    for (double h : {0.03, 0.1, 0.27, 0.6}) {
      int n = 17;
      WindowSpec win(n, dim, h);
      for (int r = 1; r <= n; ++r) {
        for (int c = 1; c <= (dim == 1 ? 1 : n); ++c) {
          auto w = win.indices({r, c});
          EXPECT_TRUE(as_set(w).count({r, c}));
          for (auto j : w) {
            EXPECT_GE(j.row, 1);
            EXPECT_LE(j.row, n);
            EXPECT_GE(j.col, 1);
            EXPECT_LE(j.col, n);
            double d2 = double((j.row - r) * (j.row - r) + (j.col - c) * (j.col - c));
            EXPECT_LE(d2, (n * h) * (n * h) * (1 + 1e-12));
          }
        }
      }
    }
  }
}

TEST(Window, SizeBoundsAndInteriorCount) {
  int n = 50;
  for (double h : {0.02, 0.05, 0.1, 0.2}) {
    int r = radius_samples(n, h);
    for (int dim : {1, 2}) {
      WindowSpec win(n, dim, h);
      std::size_t cap = dim == 1 ? std::size_t(2 * r + 1) : std::size_t((2 * r + 1) * (2 * r + 1));
      for (int i = 1; i <= n; ++i) {
        auto w = win.indices({i, dim == 1 ? 1 : (i % n) + 1});
        EXPECT_LE(w.size(), cap);
        if (dim == 1 && i > r && i <= n - r) {
          EXPECT_EQ(w.size(), std::size_t(2 * r + 1));
        }
      }
    }
  }
}

TEST(Window, ReflectionSymmetry) {
  int n = 23;
  for (int dim : {1, 2}) {
    WindowSpec win(n, dim, 0.13);
    for (int r = 1; r <= n; ++r) {
      int c = dim == 1 ? 1 : (3 * r) % n + 1;
      auto w = as_set(win.indices({r, c}));
      std::set<GridIndex> reflected;
      for (auto j : win.indices({n + 1 - r, dim == 1 ? 1 : n + 1 - c})) {
        reflected.insert({n + 1 - j.row, dim == 1 ? 1 : n + 1 - j.col});
      }
      EXPECT_EQ(w, reflected);
    }
  }
}

TEST(GridSample, ValidatesShapeAndValues) {
  EXPECT_THROW(GridSample(1, 4, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(GridSample(2, 2, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(GridSample(3, 2, {1, 2}), std::invalid_argument);
  EXPECT_THROW(GridSample(1, 2, {1, NAN}), std::invalid_argument);
  EXPECT_THROW(GridSample(1, 2, {1, INFINITY}), std::invalid_argument);
  GridSample g(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(g.at({2, 1}), 3);
  EXPECT_EQ(g.index_of(3), (GridIndex{2, 2}));
}

TEST(SamplePhantom, StepAtFour) {
  auto g = canonical_step().sample(4);
  EXPECT_EQ(g.values(), (std::vector<double>{0, 1, 1, 1}));
}

TEST(SamplePhantom, Constant) {
  for (int n : {1, 5, 64}) {
    auto g = constant_phantom(0.5).sample(n);
    for (double v : g.values()) EXPECT_EQ(v, 0.5);
  }
}

TEST(SamplePhantom, DiscAtTwo) {
  auto g = canonical_disc().sample(2);
  EXPECT_EQ(g.at({1, 1}), 1.0);  // (1/2, 1/2)
  EXPECT_EQ(g.at({2, 2}), 0.0);
}

TEST(AddNoise, ZeroSigmaIsIdentity) {
  auto clean = canonical_step().sample(33);
  EXPECT_EQ(add_noise(clean, NoiseModel(NoiseKind::Cauchy), 0.0, 5), clean);
  auto disc = canonical_disc().sample(16);
  EXPECT_EQ(add_noise(disc, NoiseModel(NoiseKind::Gaussian), 0.0, 5), disc);
}

TEST(AddNoise, Deterministic) {
  auto clean = canonical_step().sample(100);
  NoiseModel g(NoiseKind::Gaussian);
  EXPECT_EQ(add_noise(clean, g, 0.7, 42), add_noise(clean, g, 0.7, 42));
  EXPECT_NE(add_noise(clean, g, 0.7, 42), add_noise(clean, g, 0.7, 43));
  EXPECT_NE(add_noise(clean, g, 0.7, 42, 0), add_noise(clean, g, 0.7, 42, 1));
  EXPECT_THROW(add_noise(clean, g, -0.1, 1), std::domain_error);
}

TEST(AddNoise, GaussianMoments) {
  auto zero = GridSample::filled(1, 10000, 0.0);
  auto y = add_noise(zero, NoiseModel(NoiseKind::Gaussian), 1.0, 2024);
  double mean = 0, sq = 0;
  for (double v : y.values()) mean += v;
  mean /= 1e4;
  for (double v : y.values()) sq += (v - mean) * (v - mean);
  double var = sq / (1e4 - 1);
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(1e4));
  EXPECT_NEAR(var, 1.0, 0.1);
}

TEST(Csv, RoundTrip) {
  for (auto g : {canonical_step().sample(9), add_noise(canonical_disc().sample(7), NoiseModel(NoiseKind::Laplace), 0.3, 1)}) {
    std::stringstream ss;
    write_csv(ss, g);
    EXPECT_EQ(read_csv(ss), g);
  }
}

TEST(Csv, HeaderLayout) {
  std::stringstream ss;
  write_csv(ss, GridSample(2, 2, {1, 2, 3, 4}));
  EXPECT_EQ(ss.str(), "dim,n\n2,2\n1,2\n3,4\n");
}

TEST(Csv, AcceptsMissingLabelLineAndRejectsGarbage) {
  std::stringstream ok("1,3\n0.5\n1\n2\n");
  EXPECT_EQ(read_csv(ok), GridSample(1, 3, {0.5, 1, 2}));
  std::stringstream short_input("dim,n\n1,3\n0.5\n1\n");
  EXPECT_THROW(read_csv(short_input), std::invalid_argument);
  std::stringstream junk("dim,n\n1,2\n0.5\nabc\n");
  EXPECT_THROW(read_csv(junk), std::runtime_error);
}
