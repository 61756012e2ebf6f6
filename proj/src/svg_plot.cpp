#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "cavroute/sweep.hpp"
#include "format.hpp"

namespace cavroute {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 72, kRight = 24, kTop = 36, kBottom = 52;

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // finite y only
};

struct Frame {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;

  double px(double x) const {
    return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom -
           (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
  }
};

Frame fit_frame(const std::vector<Series>& series) {
  Frame f;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
  if (!(y_hi > y_lo)) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  double pad = 0.06 * (y_hi - y_lo);
  f.x_lo = x_lo;
  f.x_hi = x_hi;
  f.y_lo = y_lo - pad;
  f.y_hi = y_hi + pad;
  return f;
}

std::string tick_label(double v) {
  double r = std::round(v * 100.0) / 100.0;
  if (r == std::round(r)) return fmt_fixed(r, 0);
  return fmt_fixed(r, 2);
}

void render(std::ofstream& out, const std::string& title,
            const std::string& x_label, const std::string& y_label,
            const std::vector<Series>& series) {
  Frame f = fit_frame(series);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt_fixed(kWidth / 2, 1)
      << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";

  // Axes box and ticks.
  out << "<rect x=\"" << fmt_fixed(kLeft, 1) << "\" y=\"" << fmt_fixed(kTop, 1)
      << "\" width=\"" << fmt_fixed(kWidth - kLeft - kRight, 1)
      << "\" height=\"" << fmt_fixed(kHeight - kTop - kBottom, 1)
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    double xv = f.x_lo + (f.x_hi - f.x_lo) * i / 5.0;
    double yv = f.y_lo + (f.y_hi - f.y_lo) * i / 5.0;
    out << "<line x1=\"" << fmt_fixed(f.px(xv), 1) << "\" y1=\""
        << fmt_fixed(kHeight - kBottom, 1) << "\" x2=\""
        << fmt_fixed(f.px(xv), 1) << "\" y2=\""
        << fmt_fixed(kHeight - kBottom + 5, 1)
        << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt_fixed(f.px(xv), 1) << "\" y=\""
        << fmt_fixed(kHeight - kBottom + 18, 1)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << tick_label(xv) << "</text>\n";
    out << "<line x1=\"" << fmt_fixed(kLeft - 5, 1) << "\" y1=\""
        << fmt_fixed(f.py(yv), 1) << "\" x2=\"" << fmt_fixed(kLeft, 1)
        << "\" y2=\"" << fmt_fixed(f.py(yv), 1)
        << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt_fixed(kLeft - 8, 1) << "\" y=\""
        << fmt_fixed(f.py(yv) + 4, 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << fmt_fixed((kLeft + kWidth - kRight) / 2, 1)
      << "\" y=\"" << fmt_fixed(kHeight - 14, 1)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << fmt_fixed((kTop + kHeight - kBottom) / 2, 1)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 "
      << fmt_fixed((kTop + kHeight - kBottom) / 2, 1) << ")\">" << y_label
      << "</text>\n";

  for (const Series& s : series) {
    if (s.points.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) out << ' ';
      out << fmt_fixed(f.px(s.points[i].first), 2) << ','
          << fmt_fixed(f.py(s.points[i].second), 2);
    }
    out << "\"/>\n";
  }

  double ly = kTop + 14;
  for (const Series& s : series) {
    if (s.label.empty()) continue;
    out << "<line x1=\"" << fmt_fixed(kLeft + 10, 1) << "\" y1=\""
        << fmt_fixed(ly - 4, 1) << "\" x2=\"" << fmt_fixed(kLeft + 34, 1)
        << "\" y2=\"" << fmt_fixed(ly - 4, 1) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << fmt_fixed(kLeft + 40, 1) << "\" y=\""
        << fmt_fixed(ly, 1)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
        << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
}

Series gamma_series(const SweepResult& result, const std::string& label,
                    const std::string& color,
                    double (*pick)(const SweepRow&)) {
  Series s{label, color, {}};
  for (const SweepRow& row : result.rows) {
    double v = pick(row);
    if (std::isfinite(v)) s.points.push_back({row.gamma, v});
  }
  return s;
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "per_class_time_vs_gamma") return PlotKind::PerClassTimeVsGamma;
  if (s == "per_class_energy_vs_gamma") return PlotKind::PerClassEnergyVsGamma;
  if (s == "savings_vs_gamma") return PlotKind::SavingsVsGamma;
  if (s == "convergence_trace") return PlotKind::ConvergenceTrace;
  throw InputError("unknown plot kind '" + s + "'");
}

void emit_plot(const SweepResult& result, PlotKind kind,
               const std::string& path) {
  if (result.rows.empty()) throw InputError("cannot plot an empty sweep");

  std::vector<Series> series;
  std::string title, x_label = "CAV penetration rate", y_label;
  switch (kind) {
    case PlotKind::PerClassTimeVsGamma:
      title = "Average travel time by class";
      y_label = "travel time (min/vehicle)";
      series.push_back(gamma_series(result, "CAV", "#1f77b4", [](const SweepRow& r) {
        return r.metrics.cav_avg_time_min.value_or(std::nan(""));
      }));
      series.push_back(
          gamma_series(result, "non-CAV", "#d62728", [](const SweepRow& r) {
            return r.metrics.noncav_avg_time_min.value_or(std::nan(""));
          }));
      break;
    case PlotKind::PerClassEnergyVsGamma:
      title = "Average energy cost by class";
      y_label = "energy cost ($/vehicle)";
      series.push_back(gamma_series(result, "CAV", "#1f77b4", [](const SweepRow& r) {
        return r.metrics.cav_energy_usd.value_or(std::nan(""));
      }));
      series.push_back(
          gamma_series(result, "non-CAV", "#d62728", [](const SweepRow& r) {
            return r.metrics.noncav_energy_usd.value_or(std::nan(""));
          }));
      break;
    case PlotKind::SavingsVsGamma:
      title = "Savings vs 0% CAV baseline";
      y_label = "savings (%)";
      series.push_back(
          gamma_series(result, "CAV time", "#1f77b4",
                       [](const SweepRow& r) { return r.cav_time_savings_pct; }));
      series.push_back(gamma_series(
          result, "non-CAV time", "#d62728",
          [](const SweepRow& r) { return r.noncav_time_savings_pct; }));
      series.push_back(gamma_series(
          result, "CAV energy", "#2ca02c",
          [](const SweepRow& r) { return r.cav_energy_savings_pct; }));
      series.push_back(gamma_series(
          result, "non-CAV energy", "#9467bd",
          [](const SweepRow& r) { return r.noncav_energy_savings_pct; }));
      break;
    case PlotKind::ConvergenceTrace: {
      title = "Outer-iteration convergence";
      x_label = "outer iteration";
      y_label = "relative flow change";
      const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};
      for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        Series s;
        s.color = palette[i % 8];
        s.label = i < 8 ? "gamma " + tick_label(row.gamma) : "";
        for (std::size_t k = 0; k < row.outer_trace.size(); ++k)
          if (std::isfinite(row.outer_trace[k]))
            s.points.push_back({double(k + 1), row.outer_trace[k]});
        if (!s.points.empty()) series.push_back(std::move(s));
      }
      break;
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  render(out, title, x_label, y_label, series);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace cavroute
