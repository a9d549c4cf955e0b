#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace medlab {

/// 1-based rank of the empirical p-quantile of m values: 1 + floor(m p).
inline std::size_t quantile_rank(std::size_t m, double p) {
  if (m == 0) throw std::domain_error("quantile of an empty sample");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile level p must lie in (0,1)");
  auto rank = std::size_t(1) + std::size_t(std::floor(double(m) * p));
  if (rank > m) throw std::domain_error("quantile rank 1+floor(m p) exceeds the sample size");
  return rank;
}

/// Median rank 1 + floor(m/2): the middle value for odd m and the upper
/// middle value for even m. Every median in the library uses this rank.
inline std::size_t median_rank(std::size_t m) {
  if (m == 0) throw std::domain_error("median of an empty sample");
  return 1 + m / 2;
}

/// Order statistic Z_(1 + floor(m p)); reorders `scratch`.
inline double empirical_quantile_inplace(std::span<double> scratch, double p) {
  auto k = quantile_rank(scratch.size(), p) - 1;
  std::nth_element(scratch.begin(), scratch.begin() + std::ptrdiff_t(k), scratch.end());
  return scratch[k];
}

inline double empirical_quantile(std::span<const double> sample, double p) {
  std::vector<double> copy(sample.begin(), sample.end());
  return empirical_quantile_inplace(copy, p);
}

/// Median with the upper-middle convention; reorders `scratch`.
inline double median_inplace(std::span<double> scratch) {
  auto k = median_rank(scratch.size()) - 1;
  std::nth_element(scratch.begin(), scratch.begin() + std::ptrdiff_t(k), scratch.end());
  return scratch[k];
}

inline double median(std::span<const double> sample) {
  std::vector<double> copy(sample.begin(), sample.end());
  return median_inplace(copy);
}

}  // namespace medlab
