#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "medlab/geometry.hpp"
#include "medlab/grid.hpp"
#include "medlab/rng.hpp"

namespace medlab {

/// Outcome of a sampled class-membership check.
struct Membership {
  bool ok = true;
  std::vector<std::string> failures;

  void require(bool cond, std::string what) {
    if (!cond) {
      ok = false;
      failures.push_back(std::move(what));
    }
  }
};

/// x -> clamp(level + slope * (x - origin), 0, 1) on one piece.
struct AffinePiece {
  double level = 0.0;
  double slope = 0.0;
};

/// A piecewise-Lipschitz function on [0,1] with at most N jump points.
///
/// Piece k covers [b_k, b_{k+1}) where b_0 = 0 and the last piece is closed
/// at 1, so a breakpoint belongs to the piece on its right.
class Phantom1D {
 public:
  struct Params {
    int max_jumps = 1;  // N
    double beta = 0.0;
    double eta = 0.0;  // 0: no separation constraint
  };

  Phantom1D(std::string name, std::vector<double> breakpoints, std::vector<AffinePiece> pieces, Params params)
      : name_(std::move(name)), breaks_(std::move(breakpoints)), pieces_(std::move(pieces)), params_(params) {
    if (pieces_.size() != breaks_.size() + 1) {
      throw std::invalid_argument("Phantom1D: need exactly one piece more than breakpoints");
    }
    if (!std::is_sorted(breaks_.begin(), breaks_.end())) {
      throw std::invalid_argument("Phantom1D: breakpoints must be sorted");
    }
    for (double b : breaks_) {
      if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("Phantom1D: breakpoints must lie in (0,1)");
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const Params& params() const { return params_; }

  std::size_t piece_of(double x) const {
    return std::size_t(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
  }

  double left_end(std::size_t piece) const { return piece == 0 ? 0.0 : breaks_[piece - 1]; }

  double operator()(double x) const {
    std::size_t k = piece_of(x);
    const auto& p = pieces_[k];
    return std::clamp(p.level + p.slope * (x - left_end(k)), 0.0, 1.0);
  }

  bool same_side(double x, double y) const { return piece_of(x) == piece_of(y); }

  GridSample sample(int n) const {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) v[std::size_t(i - 1)] = (*this)(double(i) / n);
    return GridSample(1, n, std::move(v));
  }

  /// SEP-PLIP(eta, beta, N) membership, or PLIP(beta, N) when eta == 0.
  /// Lipschitz bounds are probed on 1000 random pairs per piece.
  Membership check_membership() const {
    Membership m;
    m.require(int(breaks_.size()) <= params_.max_jumps, "more breakpoints than N");
    Engine eng = make_engine(0x5EED, 0);
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      double lo = left_end(k);
      double hi = k < breaks_.size() ? breaks_[k] : 1.0;
      for (int t = 0; t < 1000; ++t) {
        double x = lo + (hi - lo) * open_unit(eng);
        double y = lo + (hi - lo) * open_unit(eng);
        double fx = (*this)(x), fy = (*this)(y);
        m.require(fx >= 0.0 && fx <= 1.0, "value outside [0,1]");
        m.require(std::abs(fx - fy) <= params_.beta * std::abs(x - y) * (1.0 + 1e-9) + 1e-15,
                  "Lipschitz bound beta violated");
        if (!m.ok) return m;
      }
    }
    if (params_.eta > 0.0) {
      for (std::size_t k = 0; k < breaks_.size(); ++k) {
        m.require(std::min(breaks_[k], 1.0 - breaks_[k]) >= params_.eta, "breakpoint closer than eta to the boundary");
        if (k + 1 < breaks_.size()) m.require(breaks_[k + 1] - breaks_[k] >= params_.eta, "breakpoints closer than eta");
      }
    }
    return m;
  }

 private:
  std::string name_;
  std::vector<double> breaks_;
  std::vector<AffinePiece> pieces_;
  Params params_;
};

/// p -> clamp(level + gx (x - 1/2) + gy (y - 1/2), 0, 1).
struct AffineField {
  double level = 0.0;
  double gx = 0.0;
  double gy = 0.0;

  double operator()(Point p) const { return std::clamp(level + gx * (p.x - 0.5) + gy * (p.y - 0.5), 0.0, 1.0); }
  double lipschitz() const { return std::hypot(gx, gy); }
};

/// A cartoon image: one Lipschitz field inside the complex, another outside.
class Phantom2D {
 public:
  struct Params {
    double lambda = 0.0;
    double beta = 0.0;
    int max_curves = 1;  // N
    double eta = 0.0;
    double kappa = 0.0;
    double theta = 0.0;
    /// Curves are C^2 with bounded curvature, so SEP-CPLIP can apply.
    bool smooth = true;
  };

  using Region = std::function<bool(Point)>;

  Phantom2D(std::string name, Complex complex, Region inside, AffineField inside_field, AffineField outside_field,
            Params params)
      : name_(std::move(name)),
        complex_(std::make_shared<const Complex>(std::move(complex))),
        inside_(std::move(inside)),
        in_(inside_field),
        out_(outside_field),
        params_(params) {
    if (!inside_) {
      auto cx = complex_;
      inside_ = [cx](Point p) { return cx->inside_parity(p) == 1; };
    }
  }

  const std::string& name() const { return name_; }
  const Complex& complex() const { return *complex_; }
  const Params& params() const { return params_; }

  bool inside(Point p) const { return inside_(p); }
  double operator()(Point p) const { return inside(p) ? in_(p) : out_(p); }
  bool same_side(Point a, Point b) const { return inside(a) == inside(b); }

  GridSample sample(int n) const {
    std::vector<double> v(std::size_t(n) * std::size_t(n));
    for (int r = 1; r <= n; ++r) {
      for (int c = 1; c <= n; ++c) v[std::size_t(r - 1) * std::size_t(n) + std::size_t(c - 1)] = (*this)(grid_point(n, {r, c}));
    }
    return GridSample(2, n, std::move(v));
  }

  /// CPLIP membership; with `separated`, SEP-CPLIP (separation, curvature and
  /// chord-arc checked on the curve caches).
  Membership check_membership(bool separated) const {
    Membership m;
    m.require(int(complex_->curves().size()) <= params_.max_curves, "more curves than N");
    for (const auto& c : complex_->curves()) m.require(c.length() <= params_.lambda * (1.0 + 1e-6), "curve longer than lambda");
    m.require(in_.lipschitz() <= params_.beta + 1e-12 && out_.lipschitz() <= params_.beta + 1e-12,
              "field Lipschitz constant exceeds beta");
    Engine eng = make_engine(0x5EED, 1);
    for (int t = 0; t < 2000; ++t) {
      Point p{open_unit(eng), open_unit(eng)};
      double v = (*this)(p);
      m.require(v >= 0.0 && v <= 1.0, "value outside [0,1]");
    }
    if (separated) {
      m.require(params_.smooth, "curves are not C^2");
      m.require(complex_->well_separated(), "complex is not eta-separated");
      for (const auto& c : complex_->curves()) {
        m.require(c.measured_curvature() <= params_.kappa * (1.0 + 1e-2), "curvature exceeds kappa");
        m.require(c.measured_chord_arc(4) <= params_.theta * (1.0 + 1e-6), "chord-arc ratio exceeds theta");
      }
    }
    return m;
  }

 private:
  std::string name_;
  std::shared_ptr<const Complex> complex_;
  Region inside_;
  AffineField in_;
  AffineField out_;
  Params params_;
};

/// f = 1 on [t, 1], 0 on [0, t); t = 1/2 is the canonical step.
inline Phantom1D step_phantom(double t, std::string name) {
  if (!(t > 0.0 && t < 1.0)) throw std::domain_error("step location must lie in (0,1)");
  return Phantom1D(std::move(name), {t}, {{0.0, 0.0}, {1.0, 0.0}}, {1, 0.0, std::min(t, 1.0 - t)});
}

inline Phantom1D canonical_step() { return step_phantom(0.5, "step"); }

inline Phantom1D constant_phantom(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw std::domain_error("constant phantom value must lie in [0,1]");
  return Phantom1D("constant", {}, {{value, 0.0}}, {1, 0.0, 0.0});
}

/// Indicator of the closed disc of radius 1/4 centered at (1/2, 1/2).
inline Phantom2D canonical_disc() {
  Point center{0.5, 0.5};
  Complex cx({Curve::circle(center, 0.25)}, 0.25);
  Phantom2D::Params params{std::numbers::pi / 2.0, 0.0, 1, 0.25, 4.0, std::numbers::pi / 2.0, true};
  return Phantom2D(
      "disc", std::move(cx), [center](Point p) { return norm(p - center) <= 0.25; }, {1.0, 0.0, 0.0},
      {0.0, 0.0, 0.0}, params);
}

/// Indicator of the closed axis-aligned square of side `side` centered at
/// (1/2, 1/2). Corners rule out SEP-CPLIP; the phantom is CPLIP(lambda, 0, 1).
inline Phantom2D canonical_square(double side, double lambda = 2.0) {
  if (!(side > 0.0 && side < std::min(0.5, lambda / 4.0))) {
    throw std::domain_error("square side must lie in (0, min(1/2, lambda/4))");
  }
  double lo = 0.5 - side / 2.0, hi = 0.5 + side / 2.0;
  Complex cx({Curve::polyline({{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}})}, lo);
  Phantom2D::Params params{lambda, 0.0, 1, lo, std::numeric_limits<double>::infinity(), 2.0, false};
  return Phantom2D(
      "square", std::move(cx), [lo, hi](Point p) { return p.x >= lo && p.x <= hi && p.y >= lo && p.y <= hi; },
      {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, params);
}

/// A random SEP-PLIP(eta, beta, N) member: N eta-separated breakpoints and
/// clamped affine pieces with slopes in [-beta, beta].
inline Phantom1D random_phantom_1d(int max_jumps, double beta, double eta, std::uint64_t seed) {
  if (max_jumps < 1) throw std::domain_error("random phantom needs N >= 1");
  if (!(beta >= 0.0)) throw std::domain_error("Lipschitz bound beta must be nonnegative");
  if (!(eta >= 0.0 && eta < 1.0 / (2.0 * max_jumps))) {
    throw std::domain_error("separation eta must lie in [0, 1/(2N))");
  }
  Engine eng = make_engine(seed, 0);
  double slack = 1.0 - double(max_jumps + 1) * eta;
  std::vector<double> u(static_cast<std::size_t>(max_jumps));
  for (double& x : u) x = slack * open_unit(eng);
  std::sort(u.begin(), u.end());
  std::vector<double> breaks(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) breaks[k] = u[k] + double(k + 1) * eta;
  std::vector<AffinePiece> pieces(breaks.size() + 1);
  for (auto& p : pieces) {
    p.level = open_unit(eng);
    p.slope = beta * (2.0 * open_unit(eng) - 1.0);
  }
  return Phantom1D("random1d:" + std::to_string(seed), std::move(breaks), std::move(pieces), {max_jumps, beta, eta});
}

/// A random SEP-CPLIP member: an ellipse near the center with clamped
/// affine fields (gradient norm <= 1) inside and outside.
inline Phantom2D random_phantom_2d(std::uint64_t seed) {
  Engine eng = make_engine(seed, 0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * open_unit(eng); };
  Point center{uniform(0.45, 0.55), uniform(0.45, 0.55)};
  double a = uniform(0.15, 0.3), b = uniform(0.15, 0.3), rot = uniform(0.0, std::numbers::pi);
  double cr = std::cos(rot), sr = std::sin(rot);
  auto gamma = [=](double t) {
    double ang = 2.0 * std::numbers::pi * t;
    double ex = a * std::cos(ang), ey = b * std::sin(ang);
    return Point{center.x + cr * ex - sr * ey, center.y + sr * ex + cr * ey};
  };
  double kappa = std::max(a / (b * b), b / (a * a));
  Curve probe = Curve::parametric(gamma, kappa, 0.0);
  double theta = probe.measured_chord_arc(2) * 1.01;
  Curve curve = Curve::parametric(gamma, kappa, theta);
  double lambda = curve.length() * (1.0 + 1e-6);
  auto inside = [=](Point p) {
    double dx = p.x - center.x, dy = p.y - center.y;
    double u = (cr * dx + sr * dy) / a, v = (-sr * dx + cr * dy) / b;
    return u * u + v * v <= 1.0;
  };
  auto field = [&](double lo, double hi) {
    double g = uniform(0.0, 1.0), dir = uniform(0.0, 2.0 * std::numbers::pi);
    return AffineField{uniform(lo, hi), g * std::cos(dir), g * std::sin(dir)};
  };
  AffineField in = field(0.6, 1.0);
  AffineField out = field(0.0, 0.4);
  Phantom2D::Params params{lambda, 1.0, 1, 0.1, kappa * 1.001, theta, true};
  return Phantom2D("random2d:" + std::to_string(seed), Complex({std::move(curve)}, 0.1), inside, in, out, params);
}

/// A phantom of either dimension.
class Phantom {
 public:
  Phantom(Phantom1D p) : impl_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  Phantom(Phantom2D p) : impl_(std::move(p)) {}  // NOLINT(google-explicit-constructor)

  int dim() const { return impl_.index() == 0 ? 1 : 2; }

  const std::string& name() const {
    return std::visit([](const auto& p) -> const std::string& { return p.name(); }, impl_);
  }

  GridSample sample(int n) const {
    return std::visit([n](const auto& p) { return p.sample(n); }, impl_);
  }

  /// Whether grid indices i and j lie on the same side of the discontinuities.
  bool same_side(int n, GridIndex i, GridIndex j) const {
    if (const auto* p = std::get_if<Phantom1D>(&impl_)) return p->same_side(double(i.row) / n, double(j.row) / n);
    return std::get<Phantom2D>(impl_).same_side(grid_point(n, i), grid_point(n, j));
  }

  const Phantom1D* as_1d() const { return std::get_if<Phantom1D>(&impl_); }
  const Phantom2D* as_2d() const { return std::get_if<Phantom2D>(&impl_); }

 private:
  std::variant<Phantom1D, Phantom2D> impl_;
};

/// Resolves `step | step:<t> | disc | square | random1d:<seed> | random2d:<seed>`.
inline Phantom phantom_by_name(const std::string& name) {
  if (name == "step") return canonical_step();
  if (name == "disc") return canonical_disc();
  if (name == "square") return canonical_square(0.25);
  auto seeded = [&](const std::string& prefix) -> std::optional<std::uint64_t> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    std::string digits = name.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("phantom '" + name + "': seed must be a nonnegative integer");
    }
    return std::stoull(digits);
  };
  if (auto s = seeded("random1d:")) return random_phantom_1d(3, 1.0, 0.1, *s);
  if (name.rfind("step:", 0) == 0) {
    double t = 0.0;
    try {
      t = detail::parse_double(name.substr(5));
    } catch (const std::exception&) {
      throw std::invalid_argument("phantom '" + name + "': bad step location");
    }
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("phantom '" + name + "': step location must lie in (0,1)");
    return step_phantom(t, name);
  }
  if (auto s = seeded("random2d:")) return random_phantom_2d(*s);
  throw std::invalid_argument("unknown phantom '" + name + "' (expected step|step:<t>|disc|square|random1d:<seed>|random2d:<seed>)");
}

/// rho(i) and p(i) for a phantom's discontinuity set.
inline GoodFraction good_fraction(int n, double h, GridIndex i, const Phantom& phantom) {
  return good_fraction(n, phantom.dim(), h, i,
                       [&](GridIndex a, GridIndex b) { return phantom.same_side(n, a, b); });
}

}  // namespace medlab
