#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "medlab/grid.hpp"
#include "medlab/quantile.hpp"

namespace medlab {

namespace detail {

// Fenwick tree over ranks 0..size-1 holding 0/1 occupancy counts.
class RankCounter {
 public:
  explicit RankCounter(std::size_t size) : tree_(size + 1, 0) {
    top_ = 1;
    while (top_ * 2 <= size) top_ *= 2;
  }

  void add(std::size_t rank, int delta) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  /// Rank of the k-th smallest occupied slot, k >= 1.
  std::size_t kth(int k) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step >>= 1) {
      std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] < k) {
        pos = next;
        k -= tree_[next];
      }
    }
    return pos;
  }

 private:
  std::vector<int> tree_;
  std::size_t top_ = 1;
};

}  // namespace detail

/// A grid sample together with its rank transform. Ties are broken by
/// offset, so every value has a distinct rank and any order statistic of a
/// window equals the value at the corresponding rank.
class RankedSample {
 public:
  explicit RankedSample(const GridSample& g) : sample_(g), rank_(g.size()), sorted_(g.size()) {
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    const auto& v = g.values();
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return v[a] < v[b] || (v[a] == v[b] && a < b);
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
      rank_[order[r]] = r;
      sorted_[r] = v[order[r]];
    }
  }

  const GridSample& sample() const { return sample_; }
  std::size_t rank(std::size_t offset) const { return rank_[offset]; }
  double value_at_rank(std::size_t r) const { return sorted_[r]; }

 private:
  GridSample sample_;
  std::vector<std::size_t> rank_;
  std::vector<double> sorted_;
};

/// L_h: the average over the window W[n,h](i).
inline GridSample linear_filter(const GridSample& input, double h) {
  WindowSpec win(input.n(), input.dim(), h);
  const int n = input.n();
  const int r = win.radius();
  const auto& v = input.values();
  std::vector<double> out(v.size());
  if (r == 0) return input;
  if (input.dim() == 1) {
    std::vector<double> prefix(std::size_t(n) + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[std::size_t(i) + 1] = prefix[std::size_t(i)] + v[std::size_t(i)];
    for (int i = 0; i < n; ++i) {
      int lo = std::max(0, i - r), hi = std::min(n - 1, i + r);
      out[std::size_t(i)] = (prefix[std::size_t(hi) + 1] - prefix[std::size_t(lo)]) / double(hi - lo + 1);
    }
    return GridSample(1, n, std::move(out));
  }
  // Row prefix sums; each window is a stack of row segments.
  const std::size_t stride = std::size_t(n) + 1;
  std::vector<double> prefix(std::size_t(n) * stride, 0.0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      prefix[std::size_t(y) * stride + std::size_t(x) + 1] =
          prefix[std::size_t(y) * stride + std::size_t(x)] + v[std::size_t(y) * std::size_t(n) + std::size_t(x)];
    }
  }
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double sum = 0.0;
      long count = 0;
      for (int dy = -r; dy <= r; ++dy) {
        int yy = y + dy;
        if (yy < 0 || yy >= n) continue;
        int w = win.half_width(dy);
        int lo = std::max(0, x - w), hi = std::min(n - 1, x + w);
        sum += prefix[std::size_t(yy) * stride + std::size_t(hi) + 1] - prefix[std::size_t(yy) * stride + std::size_t(lo)];
        count += hi - lo + 1;
      }
      out[std::size_t(y) * std::size_t(n) + std::size_t(x)] = sum / double(count);
    }
  }
  return GridSample(2, n, std::move(out));
}

/// M_h on a pre-ranked sample: the window order statistic at rank
/// 1 + floor(m/2), maintained incrementally in a Fenwick tree over ranks.
inline GridSample median_filter(const RankedSample& ranked, double h) {
  const GridSample& input = ranked.sample();
  WindowSpec win(input.n(), input.dim(), h);
  const int n = input.n();
  const int r = win.radius();
  if (r == 0) return input;
  std::vector<double> out(input.size());
  detail::RankCounter counter(input.size());
  auto median_of = [&](long count) {
    return ranked.value_at_rank(counter.kth(int(median_rank(std::size_t(count)))));
  };

  if (input.dim() == 1) {
    long count = 0;
    for (int j = 0; j <= std::min(n - 1, r); ++j, ++count) counter.add(ranked.rank(std::size_t(j)), 1);
    for (int i = 0; i < n; ++i) {
      out[std::size_t(i)] = median_of(count);
      if (int drop = i - r; drop >= 0) {
        counter.add(ranked.rank(std::size_t(drop)), -1);
        --count;
      }
      if (int add = i + 1 + r; add < n) {
        counter.add(ranked.rank(std::size_t(add)), 1);
        ++count;
      }
    }
    return GridSample(1, n, std::move(out));
  }

  auto at = [n](int y, int x) { return std::size_t(y) * std::size_t(n) + std::size_t(x); };
  for (int y = 0; y < n; ++y) {
    const int y_lo = std::max(0, y - r), y_hi = std::min(n - 1, y + r);
    long count = 0;
    for (int yy = y_lo; yy <= y_hi; ++yy) {
      int w = win.half_width(yy - y);
      for (int x = 0; x <= std::min(n - 1, w); ++x, ++count) counter.add(ranked.rank(at(yy, x)), 1);
    }
    for (int x = 0; x < n; ++x) {
      out[at(y, x)] = median_of(count);
      if (x + 1 == n) break;
      for (int yy = y_lo; yy <= y_hi; ++yy) {
        int w = win.half_width(yy - y);
        if (int drop = x - w; drop >= 0) {
          counter.add(ranked.rank(at(yy, drop)), -1);
          --count;
        }
        if (int add = x + 1 + w; add < n) {
          counter.add(ranked.rank(at(yy, add)), 1);
          ++count;
        }
      }
    }
    // Window now covers columns [n-1-w, n-1] of each row; empty it.
    for (int yy = y_lo; yy <= y_hi; ++yy) {
      int w = win.half_width(yy - y);
      for (int x = std::max(0, n - 1 - w); x < n; ++x) counter.add(ranked.rank(at(yy, x)), -1);
    }
  }
  return GridSample(2, n, std::move(out));
}

inline GridSample median_filter(const GridSample& input, double h) { return median_filter(RankedSample(input), h); }

/// Block geometry of the two-scale median for a given (n, h1).
///
/// Blocks have side b = round(n h1); the coarse grid has side
/// n1 = floor(n / b), and when b does not divide n the trailing partial
/// block is merged into the last full block.
struct BlockLayout {
  int n = 0;
  int block = 1;
  int coarse = 1;

  BlockLayout(int n_, double h1) : n(n_) {
    block = int(std::lround(double(n) * h1));
    if (block < 1) throw std::domain_error("two-scale block side round(n h1) must be at least 1");
    coarse = n / block;
    if (coarse < 3) throw std::domain_error("two-scale coarse grid needs at least 3 blocks per side");
  }

  /// Coarse index (0-based) of fine position x (0-based).
  int block_of(int x) const { return std::min(x / block, coarse - 1); }
  int first(int k) const { return k * block; }
  int last(int k) const { return k + 1 == coarse ? n - 1 : (k + 1) * block - 1; }
};

/// Stage one: medians over the blocks of `layout`, a sample of side n1.
inline GridSample block_medians(const GridSample& input, const BlockLayout& layout) {
  const int n = input.n();
  if (n != layout.n) throw std::invalid_argument("block layout built for a different grid size");
  const auto& v = input.values();
  std::vector<double> scratch;
  const int k1 = layout.coarse;
  if (input.dim() == 1) {
    std::vector<double> out(static_cast<std::size_t>(k1));
    for (int k = 0; k < k1; ++k) {
      scratch.assign(v.begin() + layout.first(k), v.begin() + layout.last(k) + 1);
      out[std::size_t(k)] = median_inplace(scratch);
    }
    return GridSample(1, k1, std::move(out));
  }
  std::vector<double> out(std::size_t(k1) * std::size_t(k1));
  for (int ky = 0; ky < k1; ++ky) {
    for (int kx = 0; kx < k1; ++kx) {
      scratch.clear();
      for (int y = layout.first(ky); y <= layout.last(ky); ++y) {
        auto row = v.begin() + std::ptrdiff_t(y) * n;
        scratch.insert(scratch.end(), row + layout.first(kx), row + layout.last(kx) + 1);
      }
      out[std::size_t(ky) * std::size_t(k1) + std::size_t(kx)] = median_inplace(scratch);
    }
  }
  return GridSample(2, k1, std::move(out));
}

/// Piecewise-constant upsampling of a coarse sample back to side n.
inline GridSample upsample_blocks(const GridSample& coarse, const BlockLayout& layout) {
  const int n = layout.n;
  const int k1 = coarse.n();
  const auto& c = coarse.values();
  if (coarse.dim() == 1) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) out[std::size_t(x)] = c[std::size_t(layout.block_of(x))];
    return GridSample(1, n, std::move(out));
  }
  std::vector<double> out(std::size_t(n) * std::size_t(n));
  for (int y = 0; y < n; ++y) {
    int ky = layout.block_of(y);
    for (int x = 0; x < n; ++x) {
      out[std::size_t(y) * std::size_t(n) + std::size_t(x)] =
          c[std::size_t(ky) * std::size_t(k1) + std::size_t(layout.block_of(x))];
    }
  }
  return GridSample(2, n, std::move(out));
}

/// M^{h1,h2}: block medians at scale h1, a running median of radius h2 on
/// the coarse grid, then piecewise-constant interpolation.
inline GridSample two_scale_median(const GridSample& input, double h1, double h2) {
  if (!(h1 > 0.0 && h1 < h2 && h2 < 1.0)) throw std::domain_error("two-scale widths need 0 < h1 < h2 < 1");
  BlockLayout layout(input.n(), h1);
  return upsample_blocks(median_filter(block_medians(input, layout), h2), layout);
}

/// M_{h_m} o ... o M_{h_1}; the empty chain is the identity.
inline GridSample iterated_median(const GridSample& input, const std::vector<double>& widths) {
  GridSample current = input;
  for (double h : widths) current = median_filter(current, h);
  return current;
}

struct LinearSpec {
  double h;
};
struct MedianSpec {
  double h;
};
struct TwoScaleSpec {
  double h1;
  double h2;
};
struct ChainSpec {
  std::vector<double> widths;
};

/// One estimator with its widths.
using FilterSpec = std::variant<LinearSpec, MedianSpec, TwoScaleSpec, ChainSpec>;

inline std::string filter_name(const FilterSpec& spec) {
  struct {
    std::string operator()(const LinearSpec&) const { return "linear"; }
    std::string operator()(const MedianSpec&) const { return "median"; }
    std::string operator()(const TwoScaleSpec&) const { return "two-scale"; }
    std::string operator()(const ChainSpec&) const { return "chain"; }
  } visitor;
  return std::visit(visitor, spec);
}

/// Primary and secondary widths for reporting (h2 is NaN for single-scale).
inline std::pair<double, double> filter_widths(const FilterSpec& spec) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (auto* s = std::get_if<LinearSpec>(&spec)) return {s->h, nan};
  if (auto* s = std::get_if<MedianSpec>(&spec)) return {s->h, nan};
  if (auto* s = std::get_if<TwoScaleSpec>(&spec)) return {s->h1, s->h2};
  const auto& w = std::get<ChainSpec>(spec).widths;
  return {w.empty() ? nan : w.front(), w.size() > 1 ? w.back() : nan};
}

inline GridSample apply_filter(const FilterSpec& spec, const GridSample& input) {
  struct {
    const GridSample& in;
    GridSample operator()(const LinearSpec& s) const { return linear_filter(in, s.h); }
    GridSample operator()(const MedianSpec& s) const { return median_filter(in, s.h); }
    GridSample operator()(const TwoScaleSpec& s) const { return two_scale_median(in, s.h1, s.h2); }
    GridSample operator()(const ChainSpec& s) const { return iterated_median(in, s.widths); }
  } visitor{input};
  return std::visit(visitor, spec);
}

/// Applies many filters to one input, sharing rank transforms and block
/// medians between them. Outputs match apply_filter exactly.
class FilterBank {
 public:
  explicit FilterBank(const GridSample& input) : input_(input) {}

  GridSample apply(const FilterSpec& spec) {
    if (auto* s = std::get_if<MedianSpec>(&spec)) return median_filter(ranked(), s->h);
    if (auto* s = std::get_if<TwoScaleSpec>(&spec)) {
      if (!(s->h1 > 0.0 && s->h1 < s->h2 && s->h2 < 1.0)) throw std::domain_error("two-scale widths need 0 < h1 < h2 < 1");
      BlockLayout layout(input_.n(), s->h1);
      auto it = coarse_.find(layout.block);
      if (it == coarse_.end()) it = coarse_.emplace(layout.block, RankedSample(block_medians(input_, layout))).first;
      return upsample_blocks(median_filter(it->second, s->h2), layout);
    }
    return apply_filter(spec, input_);
  }

 private:
  const RankedSample& ranked() {
    if (!ranked_) ranked_.emplace(input_);
    return *ranked_;
  }

  const GridSample& input_;
  std::optional<RankedSample> ranked_;
  std::map<int, RankedSample> coarse_;
};

}  // namespace medlab
