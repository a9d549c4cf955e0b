#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "medlab/risk.hpp"

namespace medlab {

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace detail

inline constexpr const char* kRiskCsvHeader = "experiment,filter,phantom,model,dim,n,sigma,h1,h2,reps,seed,mse,mse_se,bias_sq,var";
inline constexpr const char* kFitCsvHeader = "experiment,slope,intercept,r2";

inline void write_risk_row(std::ostream& os, const std::string& experiment, const RiskReport& report,
                           const RiskRecord& rec) {
  using detail::fmt;
  os << experiment << ',' << filter_name(rec.spec) << ',' << report.phantom << ',' << report.model << ','
     << report.dim << ',' << report.n << ',' << fmt(report.sigma) << ',' << fmt(rec.h1) << ',' << fmt(rec.h2) << ','
     << rec.reps << ',' << rec.seed << ',' << fmt(rec.mse) << ',' << fmt(rec.mse_se) << ',' << fmt(rec.bias_sq) << ','
     << fmt(rec.var) << '\n';
}

inline void write_risk_rows(std::ostream& os, const std::string& experiment, const RiskReport& report) {
  for (const auto& rec : report.records) write_risk_row(os, experiment, report, rec);
}

inline void write_fit_row(std::ostream& os, const std::string& experiment, const RateFit& fit) {
  using detail::fmt;
  os << experiment << ',' << fmt(fit.slope) << ',' << fmt(fit.intercept) << ',' << fmt(fit.r_squared) << '\n';
}

/// A named polyline for write_svg.
struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Static line plot. Log axes drop nonpositive coordinates.
inline void write_svg(std::ostream& os, const std::string& title, const std::vector<Series>& series, bool log_x,
                      bool log_y) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](std::pair<double, double> p) {
    return std::isfinite(p.first) && std::isfinite(p.second) && (!log_x || p.first > 0) && (!log_y || p.second > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (auto p : s.points) {
      if (!usable(p)) continue;
      x0 = std::min(x0, tx(p.first));
      x1 = std::max(x1, tx(p.first));
      y0 = std::min(y0, ty(p.second));
      y1 = std::max(y1, ty(p.second));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  auto label = [](double v, bool log) {
    std::ostringstream s;
    s << std::setprecision(3) << (log ? std::pow(10.0, v) : v);
    return s.str();
  };
  os << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << label(x0, log_x) << "</text>\n";
  os << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"end\">"
     << label(x1, log_x) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << label(y0, log_y)
     << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
     << label(y1, log_y) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (auto p : series[k].points) {
      if (usable(p)) os << px(p.first) << ',' << py(p.second) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" font-size=\"12\" fill=\"" << color
       << "\">" << series[k].name << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace medlab
