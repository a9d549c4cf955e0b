#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "medlab/noise.hpp"
#include "medlab/parallel.hpp"
#include "medlab/quantile.hpp"
#include "medlab/rng.hpp"

namespace medlab {

/// A Monte Carlo mean with its standard error and provenance.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline McEstimate summarize(const std::vector<double>& draws, std::uint64_t seed) {
  double sum = 0.0;
  for (double d : draws) sum += d;
  double mean = sum / double(draws.size());
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  double var = draws.size() > 1 ? ss / double(draws.size() - 1) : 0.0;
  return {mean, std::sqrt(var / double(draws.size())), int(draws.size()), seed};
}

// Replicates are drawn on stream r of `seed`; chunks only batch the work.
template <class Draw>
std::vector<double> replicate(int reps, std::uint64_t seed, unsigned threads, Draw&& draw) {
  std::vector<double> out(static_cast<std::size_t>(reps));
  constexpr int kChunk = 256;
  std::size_t chunks = std::size_t((reps + kChunk - 1) / kChunk);
  parallel_for(chunks, threads, [&](std::size_t c) {
    int lo = int(c) * kChunk;
    int hi = std::min(reps, lo + kChunk);
    for (int r = lo; r < hi; ++r) {
      Engine eng = make_engine(seed, std::uint64_t(r));
      out[std::size_t(r)] = draw(eng);
    }
  });
  return out;
}

}  // namespace detail

/// Monte Carlo estimate of E[Med_m(Z_1..Z_m)^2] for odd m.
inline McEstimate median_second_moment_mc(const NoiseModel& model, int m, int reps, std::uint64_t seed,
                                          unsigned threads = 0) {
  if (m < 1 || m % 2 == 0) throw std::domain_error("median sample size m must be odd and positive");
  if (reps < 1000) throw std::domain_error("median moment estimate needs at least 1000 replicates");
  auto draws = detail::replicate(reps, seed, threads, [&](Engine& eng) {
    std::vector<double> xs(static_cast<std::size_t>(m));
    for (double& x : xs) x = model.sample(eng);
    double med = median_inplace(xs);
    return med * med;
  });
  return detail::summarize(draws, seed);
}

/// alpha(zeta) governing the blowup of E[Z_{m,p}^2] near p = 0, 1.
inline double alpha_of_zeta(double zeta) {
  if (!(zeta > 1.0)) throw std::domain_error("decay exponent zeta must exceed 1");
  if (std::isinf(zeta)) return 1.25;
  if (zeta > 3.0) return (5.0 * zeta - 3.0) / (4.0 * zeta - 4.0);
  return zeta / (zeta - 1.0);
}

/// Near-edge variance scale nu for a per-pixel noise level sigma < 1.
inline double nu_n(double zeta, double sigma) {
  if (!(zeta > 1.0)) throw std::domain_error("decay exponent zeta must exceed 1");
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::domain_error("noise level must lie in (0,1)");
  if (zeta > 3.0) return sigma * sigma;
  if (zeta == 3.0) return sigma * sigma * std::log(1.0 / sigma);
  return std::pow(sigma, zeta - 1.0);
}

/// B_m(y) = (2m+1)!/(m!)^2 * int_0^y (u(1-u))^m du, the CDF of the median
/// of 2m+1 uniforms. Integrated with adaptive Gauss-Kronrod on the shorter
/// tail, the normalizer handled in log space.
inline double beta_median_cdf(int m, double y) {
  if (m < 0) throw std::domain_error("repeated-median order m must be nonnegative");
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  if (y == 0.5) return 0.5;
  double tail = std::min(y, 1.0 - y);
  double log_norm = std::lgamma(2.0 * m + 2.0) - 2.0 * std::lgamma(double(m) + 1.0);
  auto integrand = [m, log_norm](double u) {
    if (m == 0) return 1.0;
    double uu = u * (1.0 - u);
    if (uu <= 0.0) return 0.0;
    return std::exp(log_norm + double(m) * std::log(uu));
  };
  double err = 0.0;
  // A tighter relative tolerance only buys roundoff-level subdivision; this
  // setting already lands within about 1e-13 of the incomplete beta function.
  double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, tail, 12,
                                                                             1e-11, &err);
  mass = std::clamp(mass, 0.0, 0.5);
  return y < 0.5 ? mass : 1.0 - mass;
}

/// CDF of sqrt(2m+1) * Median(Z_1..Z_{2m+1}): B_m(Psi(x / sqrt(2m+1))).
inline double repeated_median_cdf(const NoiseModel& model, int m, double x) {
  double scale = std::sqrt(2.0 * m + 1.0);
  return beta_median_cdf(m, model.cdf(x / scale));
}

/// Density of the scaled repeated median by central differences of the CDF.
inline double repeated_median_density(const NoiseModel& model, int m, double x) {
  double step = 1e-4 * (1.0 + std::abs(x));
  return (repeated_median_cdf(model, m, x + step) - repeated_median_cdf(model, m, x - step)) / (2.0 * step);
}

/// sup over `grid` of psi_m(x) (1 + |x|)^4.
inline double repeated_median_tail_sup(const NoiseModel& model, int m, const std::vector<double>& grid) {
  double sup = 0.0;
  for (double x : grid) {
    double v = repeated_median_density(model, m, x) * std::pow(1.0 + std::abs(x), 4.0);
    sup = std::max(sup, v);
  }
  return sup;
}

/// `count` independent draws of sqrt(2m+1) * Median(Z_1..Z_{2m+1}).
inline std::vector<double> scaled_median_samples(const NoiseModel& model, int m, int count, std::uint64_t seed,
                                                 unsigned threads = 0) {
  int size = 2 * m + 1;
  double scale = std::sqrt(double(size));
  return detail::replicate(count, seed, threads, [&](Engine& eng) {
    std::vector<double> xs(static_cast<std::size_t>(size));
    for (double& x : xs) x = model.sample(eng);
    return scale * median_inplace(xs);
  });
}

/// sup_x |F_emp(x) - F(x)| for the empirical CDF of `samples`.
inline double kolmogorov_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::domain_error("Kolmogorov distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  double n = double(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double f = cdf(samples[k]);
    d = std::max({d, std::abs(double(k + 1) / n - f), std::abs(f - double(k) / n)});
  }
  return d;
}

struct QuantileMoment {
  McEstimate moment;
  /// moment / (p(1-p))^(2 - 2 alpha)
  double ratio = 0.0;
  double ratio_stderr = 0.0;
  double alpha = 0.0;
};

/// Monte Carlo estimate of E[Z_{m,p}^2] for p in (2 alpha / m, 1 - 2 alpha / m).
inline QuantileMoment quantile_second_moment_mc(const NoiseModel& model, int m, double p, int reps,
                                                std::uint64_t seed, unsigned threads = 0) {
  double alpha = alpha_of_zeta(model.zeta());
  if (m < 1) throw std::domain_error("sample size m must be positive");
  if (!(p > 2.0 * alpha / m && p < 1.0 - 2.0 * alpha / m)) {
    throw std::domain_error("quantile level outside the admissible range (2 alpha/m, 1 - 2 alpha/m)");
  }
  if (reps < 2) throw std::domain_error("need at least two replicates");
  auto draws = detail::replicate(reps, seed, threads, [&](Engine& eng) {
    std::vector<double> xs(static_cast<std::size_t>(m));
    for (double& x : xs) x = model.sample(eng);
    double q = empirical_quantile_inplace(xs, p);
    return q * q;
  });
  QuantileMoment out;
  out.moment = detail::summarize(draws, seed);
  out.alpha = alpha;
  double shape = std::pow(p * (1.0 - p), 2.0 - 2.0 * alpha);
  out.ratio = out.moment.estimate / shape;
  out.ratio_stderr = out.moment.std_error / shape;
  return out;
}

}  // namespace medlab
