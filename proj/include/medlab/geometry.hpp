#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "medlab/grid.hpp"

namespace medlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }

/// Continuum location i/n of a 2-D grid index: row on the first axis.
inline Point grid_point(int n, GridIndex i) { return {double(i.row) / n, double(i.col) / n}; }

/// A closed planar curve held as a dense arclength polyline cache.
///
/// Vertices are equally spaced in arclength at spacing at most
/// min(1e-3, 1/(4 kappa)). `kappa` and `theta` are the declared curvature and
/// chord-arc bounds; the measured_* helpers check them on the cache.
class Curve {
 public:
  /// Samples gamma(t), t in [0,1), traced once around the curve.
  static Curve parametric(const std::function<Point(double)>& gamma, double kappa, double theta) {
    constexpr int kFine = 1 << 16;
    std::vector<Point> fine(kFine);
    for (int k = 0; k < kFine; ++k) fine[std::size_t(k)] = gamma(double(k) / kFine);
    return Curve(resample(fine, max_spacing(kappa)), kappa, theta);
  }

  /// Closed polyline through `vertices` (closure implied). Corners make the
  /// curvature unbounded, so kappa is +inf; theta is measured.
  static Curve polyline(const std::vector<Point>& vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("closed polyline needs at least 3 vertices");
    Curve c(subdivide(vertices, 1e-3), std::numeric_limits<double>::infinity(), 0.0);
    c.theta_ = c.measured_chord_arc(1);
    return c;
  }

  static Curve circle(Point center, double radius) {
    auto gamma = [=](double t) {
      double a = 2.0 * std::numbers::pi * t;
      return Point{center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
    };
    // Chord-arc ratio of a circle peaks at antipodal points: (pi r)/(2 r).
    return parametric(gamma, 1.0 / radius, std::numbers::pi / 2.0);
  }

  const std::vector<Point>& points() const { return points_; }
  double length() const { return length_; }
  double kappa() const { return kappa_; }
  double theta() const { return theta_; }
  double spacing() const { return length_ / double(points_.size()); }
  /// Longest gap between consecutive cache points.
  double max_step() const { return max_step_; }

  /// Largest arc/chord ratio over cache vertex pairs, using the shorter of
  /// the two arcs; `stride` subsamples the vertices.
  double measured_chord_arc(std::size_t stride) const {
    double worst = 0.0;
    std::size_t k = points_.size();
    double ds = spacing();
    for (std::size_t a = 0; a < k; a += stride) {
      for (std::size_t b = a + stride; b < k; b += stride) {
        double arc = double(b - a) * ds;
        arc = std::min(arc, length_ - arc);
        double chord = norm(points_[b] - points_[a]);
        if (chord > 0.0) worst = std::max(worst, arc / chord);
      }
    }
    return worst;
  }

  /// Largest Menger curvature over consecutive cache triples.
  double measured_curvature() const {
    double worst = 0.0;
    std::size_t k = points_.size();
    for (std::size_t j = 0; j < k; ++j) {
      Point a = points_[(j + k - 1) % k], b = points_[j], c = points_[(j + 1) % k];
      double ab = norm(b - a), bc = norm(c - b), ca = norm(a - c);
      double cross = std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
      if (ab * bc * ca > 0.0) worst = std::max(worst, 2.0 * cross / (ab * bc * ca));
    }
    return worst;
  }

  /// Winding number of the cache polygon around p.
  int winding_number(Point p) const {
    int wn = 0;
    std::size_t k = points_.size();
    for (std::size_t j = 0; j < k; ++j) {
      Point a = points_[j], b = points_[(j + 1) % k];
      double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
      if (a.y <= p.y) {
        if (b.y > p.y && side > 0) ++wn;
      } else if (b.y <= p.y && side < 0) {
        --wn;
      }
    }
    return wn;
  }

 private:
  Curve(std::vector<Point> points, double kappa, double theta) : points_(std::move(points)), kappa_(kappa), theta_(theta) {
    if (points_.size() < 3) throw std::invalid_argument("curve cache needs at least 3 points");
    length_ = 0.0;
    for (std::size_t j = 0; j < points_.size(); ++j) {
      double step = norm(points_[(j + 1) % points_.size()] - points_[j]);
      length_ += step;
      max_step_ = std::max(max_step_, step);
    }
  }

  static double max_spacing(double kappa) {
    double s = 1e-3;
    if (kappa > 0.0 && std::isfinite(kappa)) s = std::min(s, 1.0 / (4.0 * kappa));
    return s;
  }

  // Resamples a closed polyline at equal arclength steps no longer than `spacing`.
  static std::vector<Point> resample(const std::vector<Point>& poly, double spacing) {
    std::size_t k = poly.size();
    std::vector<double> cum(k + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j) cum[j + 1] = cum[j] + norm(poly[(j + 1) % k] - poly[j]);
    double total = cum[k];
    if (!(total > 0.0)) throw std::invalid_argument("degenerate curve of zero length");
    auto count = std::size_t(std::ceil(total / spacing));
    count = std::max<std::size_t>(count, 8);
    std::vector<Point> out(count);
    std::size_t seg = 0;
    for (std::size_t q = 0; q < count; ++q) {
      double s = total * double(q) / double(count);
      while (seg + 1 < k && cum[seg + 1] <= s) ++seg;
      double len = cum[seg + 1] - cum[seg];
      double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
      Point a = poly[seg], b = poly[(seg + 1) % k];
      out[q] = a + t * (b - a);
    }
    return out;
  }

  // Splits every edge of a closed polyline into equal steps no longer than
  // `spacing`, keeping the corners.
  static std::vector<Point> subdivide(const std::vector<Point>& poly, double spacing) {
    std::vector<Point> out;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      Point a = poly[j], b = poly[(j + 1) % poly.size()];
      auto steps = std::max<std::size_t>(1, std::size_t(std::ceil(norm(b - a) / spacing)));
      for (std::size_t q = 0; q < steps; ++q) out.push_back(a + (double(q) / double(steps)) * (b - a));
    }
    if (out.size() < 8) return resample(poly, spacing);
    return out;
  }

  std::vector<Point> points_;
  double length_ = 0.0;
  double max_step_ = 0.0;
  double kappa_ = 0.0;
  double theta_ = 0.0;
};

/// A finite collection of closed curves with separation parameter eta.
class Complex {
 public:
  Complex(std::vector<Curve> curves, double eta) : curves_(std::move(curves)), eta_(eta) {
    if (curves_.empty()) throw std::domain_error("complex must hold at least one curve");
    build_index();
  }

  const std::vector<Curve>& curves() const { return curves_; }
  double eta() const { return eta_; }

  double total_length() const {
    double s = 0.0;
    for (const auto& c : curves_) s += c.length();
    return s;
  }

  /// Largest cache spacing: the absolute error bound of distance().
  double tolerance() const {
    double s = 0.0;
    for (const auto& c : curves_) s = std::max(s, c.max_step());
    return s;
  }

  /// Distance from p to the nearest cached curve vertex.
  double distance(Point p) const {
    int cx = std::clamp(int(std::floor((p.x - origin_.x) / cell_)), 0, cells_ - 1);
    int cy = std::clamp(int(std::floor((p.y - origin_.y) / cell_)), 0, cells_ - 1);
    double best = std::numeric_limits<double>::infinity();
    // Cells on Chebyshev ring k around p's (clamped) cell lie at least
    // (k-1)*cell away from p, and never closer than p's offset from the grid.
    double outside = std::max({origin_.x - p.x, p.x - (origin_.x + cells_ * cell_), origin_.y - p.y,
                               p.y - (origin_.y + cells_ * cell_), 0.0});
    for (int ring = 0; ring <= cells_; ++ring) {
      double reach = std::max((ring - 1) * cell_, outside);
      if (reach > best) break;
      for (int gx = cx - ring; gx <= cx + ring; ++gx) {
        if (gx < 0 || gx >= cells_) continue;
        for (int gy = cy - ring; gy <= cy + ring; ++gy) {
          if (gy < 0 || gy >= cells_) continue;
          if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != ring) continue;
          for (const Point& q : buckets_[std::size_t(gx) * std::size_t(cells_) + std::size_t(gy)]) {
            best = std::min(best, norm(p - q));
          }
        }
      }
    }
    return best;
  }

  /// Number of curves whose winding number around p is odd.
  int inside_parity(Point p) const {
    int parity = 0;
    for (const auto& c : curves_) parity ^= (c.winding_number(p) & 1);
    return parity;
  }

  /// Smallest distance from any cached vertex to the boundary of [0,1]^2.
  double boundary_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curves_) {
      for (Point q : c.points()) best = std::min({best, q.x, 1.0 - q.x, q.y, 1.0 - q.y});
    }
    return best;
  }

  /// Smallest pairwise Hausdorff distance between curves (+inf for one curve).
  double pairwise_separation() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < curves_.size(); ++a) {
      for (std::size_t b = a + 1; b < curves_.size(); ++b) {
        best = std::min(best, hausdorff(curves_[a], curves_[b]));
      }
    }
    return best;
  }

  /// Separation from the boundary and between curves, with 1e-12 slack for
  /// vertices that sit exactly at distance eta.
  bool well_separated() const {
    return boundary_separation() >= eta_ - 1e-12 && pairwise_separation() >= eta_ - 1e-12;
  }

 private:
  static double directed(const Curve& a, const Curve& b) {
    double worst = 0.0;
    for (Point p : a.points()) {
      double best = std::numeric_limits<double>::infinity();
      for (Point q : b.points()) best = std::min(best, norm(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  }

  static double hausdorff(const Curve& a, const Curve& b) { return std::max(directed(a, b), directed(b, a)); }

  void build_index() {
    double lo_x = 0.0, lo_y = 0.0, hi_x = 1.0, hi_y = 1.0;
    for (const auto& c : curves_) {
      for (Point q : c.points()) {
        lo_x = std::min(lo_x, q.x);
        lo_y = std::min(lo_y, q.y);
        hi_x = std::max(hi_x, q.x);
        hi_y = std::max(hi_y, q.y);
      }
    }
    cells_ = 64;
    cell_ = std::max(hi_x - lo_x, hi_y - lo_y) / cells_ * (1.0 + 1e-9);
    origin_ = {lo_x, lo_y};
    buckets_.assign(std::size_t(cells_) * std::size_t(cells_), {});
    for (const auto& c : curves_) {
      for (Point q : c.points()) {
        int gx = std::clamp(int((q.x - origin_.x) / cell_), 0, cells_ - 1);
        int gy = std::clamp(int((q.y - origin_.y) / cell_), 0, cells_ - 1);
        buckets_[std::size_t(gx) * std::size_t(cells_) + std::size_t(gy)].push_back(q);
      }
    }
  }

  std::vector<Curve> curves_;
  double eta_ = 0.0;
  Point origin_;
  double cell_ = 1.0;
  int cells_ = 1;
  std::vector<std::vector<Point>> buckets_;
};

/// d(x, complex) against the vertex cache; error at most complex.tolerance().
inline double distance_to_complex(Point x, const Complex& complex) { return complex.distance(x); }

/// delta(i) = d(i/n, complex) for every grid index, row-major.
inline std::vector<double> distance_field(int n, const Complex& complex) {
  std::vector<double> out(std::size_t(n) * std::size_t(n));
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= n; ++c) {
      out[std::size_t(r - 1) * std::size_t(n) + std::size_t(c - 1)] = complex.distance(grid_point(n, {r, c}));
    }
  }
  return out;
}

/// Grid indices whose distance to the complex is at most h.
inline std::vector<GridIndex> near_set(int n, double h, const Complex& complex) {
  if (!(h > 0.0 && h < 1.0)) throw std::domain_error("near-set width h must lie in (0,1)");
  std::vector<GridIndex> out;
  auto field = distance_field(n, complex);
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= n; ++c) {
      if (field[std::size_t(r - 1) * std::size_t(n) + std::size_t(c - 1)] <= h) out.push_back({r, c});
    }
  }
  return out;
}

/// Band sizes #{i : ell <= n delta(i) < ell + 1} for ell = 0..n in one pass.
inline std::vector<long> annulus_band_counts(int n, const Complex& complex) {
  std::vector<long> out(static_cast<std::size_t>(n) + 1, 0);
  for (double d : distance_field(n, complex)) {
    double ell = std::floor(n * d);
    if (ell <= n) ++out[std::size_t(ell)];
  }
  return out;
}

inline long annulus_band_count(int n, int ell, const Complex& complex) {
  if (ell < 0 || ell > n) throw std::domain_error("band index ell must lie in [0, n]");
  return annulus_band_counts(n, complex)[std::size_t(ell)];
}

/// Share rho of a window lying on the same side of the discontinuities as
/// its center, and the companion quantile level p = 1/(2 rho) in [1/2, 1).
struct GoodFraction {
  double rho = 1.0;
  double p = 0.5;
  std::size_t good = 0;
  std::size_t window = 0;
};

/// `same_side(i, j)` decides whether grid index j lies in i's region.
template <class SameSide>
GoodFraction good_fraction(int n, int dim, double h, GridIndex i, SameSide&& same_side) {
  auto window = window_indices(n, dim, h, i);
  GoodFraction out;
  out.window = window.size();
  for (const auto& j : window) {
    if (same_side(i, j)) ++out.good;
  }
  out.rho = double(out.good) / double(out.window);
  out.p = std::clamp(0.5 / out.rho, 0.5, std::nextafter(1.0, 0.0));
  return out;
}

/// Reads curves as blocks of `x y` lines separated by blank lines.
inline Complex read_complex(std::istream& is, double eta) {
  std::vector<Curve> curves;
  std::vector<Point> block;
  std::string line;
  auto flush = [&] {
    if (!block.empty()) curves.push_back(Curve::polyline(block));
    block.clear();
  };
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream ss(line);
    Point p;
    if (!(ss >> p.x >> p.y)) throw std::runtime_error("polyline file: expected 'x y' in line '" + line + "'");
    block.push_back(p);
  }
  flush();
  return Complex(std::move(curves), eta);
}

}  // namespace medlab
