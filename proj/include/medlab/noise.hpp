#pragma once

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medlab/grid.hpp"
#include "medlab/quantile.hpp"
#include "medlab/rng.hpp"

namespace medlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NoiseKind { Gaussian, Laplace, Cauchy, Uniform };

/// Symmetric noise distribution Psi with density, CDF, quantile and sampler.
///
/// `zeta` is the decay exponent sup{s : psi(x)(1+|x|)^s bounded}, +inf for
/// tails lighter than every power. `variance` is +inf for the Cauchy model.
/// The uniform model lives on [-sqrt 3, sqrt 3] so that every builtin except
/// Cauchy has unit variance.
class NoiseModel {
 public:
  explicit constexpr NoiseModel(NoiseKind kind) : kind_(kind) {}

  NoiseKind kind() const { return kind_; }

  std::string_view name() const {
    switch (kind_) {
      case NoiseKind::Gaussian: return "gaussian";
      case NoiseKind::Laplace: return "laplace";
      case NoiseKind::Cauchy: return "cauchy";
      case NoiseKind::Uniform: return "uniform";
    }
    return "";
  }

  double zeta() const {
    switch (kind_) {
      case NoiseKind::Cauchy: return 2.0;
      case NoiseKind::Uniform:
      case NoiseKind::Gaussian:
      case NoiseKind::Laplace: return kInf;
    }
    return kInf;
  }

  double variance() const {
    switch (kind_) {
      case NoiseKind::Gaussian: return 1.0;
      case NoiseKind::Laplace: return 2.0;
      case NoiseKind::Cauchy: return kInf;
      case NoiseKind::Uniform: return 1.0;
    }
    return kInf;
  }

  /// The uniform density jumps at +-sqrt 3, so it is not continuous.
  bool has_continuous_density() const { return kind_ != NoiseKind::Uniform; }

  double density(double x) const {
    switch (kind_) {
      case NoiseKind::Gaussian: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      case NoiseKind::Laplace: return 0.5 * std::exp(-std::abs(x));
      case NoiseKind::Cauchy: return 1.0 / (std::numbers::pi * (1.0 + x * x));
      case NoiseKind::Uniform: return std::abs(x) <= kUniformHalfWidth ? 0.5 / kUniformHalfWidth : 0.0;
    }
    return 0.0;
  }

  double cdf(double x) const {
    switch (kind_) {
      case NoiseKind::Gaussian: return 0.5 * std::erfc(-x / std::numbers::sqrt2);
      case NoiseKind::Laplace: return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
      case NoiseKind::Cauchy: return 0.5 + std::atan(x) / std::numbers::pi;
      case NoiseKind::Uniform:
        if (x <= -kUniformHalfWidth) return 0.0;
        if (x >= kUniformHalfWidth) return 1.0;
        return (x + kUniformHalfWidth) / (2.0 * kUniformHalfWidth);
    }
    return 0.0;
  }

  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("noise quantile level must lie in (0,1)");
    switch (kind_) {
      case NoiseKind::Gaussian: return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
      case NoiseKind::Laplace: return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
      case NoiseKind::Cauchy: return std::tan(std::numbers::pi * (p - 0.5));
      case NoiseKind::Uniform: return -kUniformHalfWidth + 2.0 * kUniformHalfWidth * p;
    }
    return 0.0;
  }

  double sample(Engine& eng) const { return quantile(open_unit(eng)); }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

  static constexpr double kUniformHalfWidth = 1.7320508075688772;  // sqrt(3)

 private:
  NoiseKind kind_;
};

inline std::vector<NoiseModel> builtin_models() {
  return {NoiseModel(NoiseKind::Gaussian), NoiseModel(NoiseKind::Laplace),
          NoiseModel(NoiseKind::Cauchy), NoiseModel(NoiseKind::Uniform)};
}

inline NoiseModel model_by_name(std::string_view name) {
  for (const auto& m : builtin_models()) {
    if (m.name() == name) return m;
  }
  throw std::invalid_argument("unknown noise model '" + std::string(name) +
                              "' (expected gaussian|laplace|cauchy|uniform)");
}

/// Y = clean + sigma * Z with Z drawn i.i.d. from the model, in offset order,
/// from stream `stream` of `seed`.
inline GridSample add_noise(const GridSample& clean, const NoiseModel& model, double sigma,
                            std::uint64_t seed, std::uint64_t stream = 0) {
  if (!(sigma >= 0.0)) throw std::domain_error("noise level sigma must be nonnegative");
  if (sigma == 0.0) return clean;
  std::vector<double> values = clean.values();
  Engine eng = make_engine(seed, stream);
  for (double& v : values) v += sigma * model.sample(eng);
  return GridSample(clean.dim(), clean.n(), std::move(values));
}

/// F(t) = (1 - eps) Psi(t) + eps Psi(t - delta).
struct MixtureCdf {
  double eps;
  double delta;
  NoiseModel base;

  MixtureCdf(double eps_, double delta_, NoiseModel base_) : eps(eps_), delta(delta_), base(base_) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::domain_error("mixture weight must lie in [0,1)");
    if (!(delta >= 0.0)) throw std::domain_error("mixture shift must be nonnegative");
  }

  double operator()(double t) const { return (1.0 - eps) * base.cdf(t) + eps * base.cdf(t - delta); }
};

/// Population median mu(eps, delta) of the contaminated mixture, by bisection.
///
/// For eps < 1/2 the root lies in [0, delta]: F(0) <= 1/2 <= F(delta) since
/// Psi is symmetric. Returns within 1e-12 of the root.
inline double population_contaminated_median(double eps, double delta, const NoiseModel& base) {
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw std::domain_error("contamination fraction must lie in [0, 1/2)");
  }
  if (!(delta >= 0.0)) throw std::domain_error("contamination shift must be nonnegative");
  if (eps == 0.0 || delta == 0.0) return 0.0;
  MixtureCdf F(eps, delta, base);
  double lo = 0.0;
  double hi = delta;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// One draw of Med(Z_1..Z_n, Z_{n+1}+delta, ..., Z_{n+m}+delta).
inline double contaminated_median_sample(int n_good, int m_bad, double delta, const NoiseModel& base,
                                         std::uint64_t seed, std::uint64_t stream = 0) {
  if (n_good < 1) throw std::domain_error("need at least one uncontaminated draw");
  if (m_bad < 0) throw std::domain_error("contaminated count must be nonnegative");
  Engine eng = make_engine(seed, stream);
  std::vector<double> xs(static_cast<std::size_t>(n_good + m_bad));
  for (int k = 0; k < n_good; ++k) xs[std::size_t(k)] = base.sample(eng);
  for (int k = 0; k < m_bad; ++k) xs[std::size_t(n_good + k)] = base.sample(eng) + delta;
  return median_inplace(xs);
}

}  // namespace medlab
