#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace medlab {

/// A 1-based grid index. For dim == 1 only `row` is used.
struct GridIndex {
  int row = 1;
  int col = 1;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

/// Real values sampled on {1,...,n}^dim, stored row-major.
///
/// Index (r, c) with 1 <= r, c <= n lives at offset (r-1)*n + (c-1). For dim 1
/// the sample is a plain vector of length n.
class GridSample {
 public:
  GridSample() = default;

  GridSample(int dim, int n, std::vector<double> values)
      : dim_(dim), n_(n), values_(std::move(values)) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("GridSample: dim must be 1 or 2");
    if (n_ < 1) throw std::invalid_argument("GridSample: n must be positive");
    if (values_.size() != expected_size()) {
      throw std::invalid_argument("GridSample: value count does not match n^dim");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::invalid_argument("GridSample: non-finite value");
    }
  }

  static GridSample filled(int dim, int n, double value) {
    std::size_t size = dim == 1 ? std::size_t(n) : std::size_t(n) * std::size_t(n);
    return GridSample(dim, n, std::vector<double>(size, value));
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  double operator[](std::size_t offset) const { return values_[offset]; }

  double at(GridIndex i) const { return values_[offset(i)]; }

  std::size_t offset(GridIndex i) const {
    check_index(i);
    if (dim_ == 1) return std::size_t(i.row - 1);
    return std::size_t(i.row - 1) * std::size_t(n_) + std::size_t(i.col - 1);
  }

  GridIndex index_of(std::size_t offset) const {
    if (dim_ == 1) return {int(offset) + 1, 1};
    return {int(offset / std::size_t(n_)) + 1, int(offset % std::size_t(n_)) + 1};
  }

  void check_index(GridIndex i) const {
    bool ok = i.row >= 1 && i.row <= n_ && (dim_ == 1 || (i.col >= 1 && i.col <= n_));
    if (!ok) throw std::domain_error("grid index outside I_n^dim");
  }

  friend bool operator==(const GridSample&, const GridSample&) = default;

 private:
  std::size_t expected_size() const {
    return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * std::size_t(n_);
  }

  int dim_ = 1;
  int n_ = 1;
  std::vector<double> values_;
};

/// Integer radius floor(n*h). The small relative slack keeps products such as
/// n * (3.0 / n) from rounding down to 2.
inline int radius_samples(int n, double h) {
  return int(std::floor(double(n) * h * (1.0 + 1e-12)));
}

/// Squared continuum radius (nh)^2 in sample units, with the same slack.
inline double radius_squared(int n, double h) {
  double r = double(n) * h;
  return r * r * (1.0 + 1e-12);
}

/// Discrete smoothing window W[n,h](i) for a fixed (n, dim, h).
class WindowSpec {
 public:
  WindowSpec(int n, int dim, double h) : n_(n), dim_(dim), h_(h) {
    if (!(h > 0.0 && h < 1.0)) throw std::domain_error("window width h must lie in (0,1)");
    if (n < 1) throw std::domain_error("grid side n must be positive");
    if (dim != 1 && dim != 2) throw std::domain_error("dim must be 1 or 2");
    radius_ = radius_samples(n, h);
    r2_ = radius_squared(n, h);
    half_widths_.resize(std::size_t(radius_) + 1);
    for (int dy = 0; dy <= radius_; ++dy) {
      int w = 0;
      while (double((w + 1) * (w + 1) + dy * dy) <= r2_) ++w;
      half_widths_[std::size_t(dy)] = w;
    }
  }

  int n() const { return n_; }
  int dim() const { return dim_; }
  double h() const { return h_; }
  int radius() const { return radius_; }

  /// Largest |dx| with dx^2 + dy^2 <= (nh)^2; requires |dy| <= radius().
  int half_width(int dy) const { return half_widths_[std::size_t(std::abs(dy))]; }

  /// Enumerates the window around i, clipped to the grid.
  std::vector<GridIndex> indices(GridIndex i) const {
    check(i);
    std::vector<GridIndex> out;
    if (dim_ == 1) {
      for (int j = std::max(1, i.row - radius_); j <= std::min(n_, i.row + radius_); ++j) {
        out.push_back({j, 1});
      }
      return out;
    }
    for (int dy = -radius_; dy <= radius_; ++dy) {
      int r = i.row + dy;
      if (r < 1 || r > n_) continue;
      int w = half_width(dy);
      for (int c = std::max(1, i.col - w); c <= std::min(n_, i.col + w); ++c) out.push_back({r, c});
    }
    return out;
  }

 private:
  void check(GridIndex i) const {
    bool ok = i.row >= 1 && i.row <= n_ && (dim_ == 1 || (i.col >= 1 && i.col <= n_));
    if (!ok) throw std::domain_error("grid index outside I_n^dim");
  }

  int n_;
  int dim_;
  double h_;
  int radius_ = 0;
  double r2_ = 0.0;
  std::vector<int> half_widths_;
};

/// {j in I_n^dim : ||j - i|| <= nh}; Euclidean norm for dim 2.
inline std::vector<GridIndex> window_indices(int n, int dim, double h, GridIndex i) {
  return WindowSpec(n, dim, h).indices(i);
}

// CSV layout: a `dim,n` header line, a line carrying the two numbers, then
// one value per line (dim 1) or one comma-separated row per grid row (dim 2).

inline void write_csv(std::ostream& os, const GridSample& g) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "dim,n\n" << g.dim() << ',' << g.n() << '\n';
  if (g.dim() == 1) {
    for (double v : g.values()) buf << v << '\n';
  } else {
    for (int r = 0; r < g.n(); ++r) {
      for (int c = 0; c < g.n(); ++c) {
        if (c) buf << ',';
        buf << g.values()[std::size_t(r) * std::size_t(g.n()) + std::size_t(c)];
      }
      buf << '\n';
    }
  }
  os << buf.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("grid csv: cannot parse number '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw std::runtime_error("grid csv: trailing characters in '" + s + "'");
  return v;
}

}  // namespace detail

inline GridSample read_csv(std::istream& is) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw std::runtime_error("grid csv: empty input");
  if (line == "dim,n" && !next_line()) throw std::runtime_error("grid csv: missing dim,n values");
  auto header = detail::split_csv_line(line);
  if (header.size() != 2) throw std::runtime_error("grid csv: header must be 'dim,n'");
  int dim = int(detail::parse_double(header[0]));
  int n = int(detail::parse_double(header[1]));
  if ((dim != 1 && dim != 2) || n < 1) throw std::runtime_error("grid csv: bad dim or n");

  std::vector<double> values;
  while (next_line()) {
    for (const auto& f : detail::split_csv_line(line)) values.push_back(detail::parse_double(f));
  }
  return GridSample(dim, n, std::move(values));
}

}  // namespace medlab
