#include "vrstab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace vrstab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

void row(std::ostringstream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string stability_csv(const StabilityResult& res) {
  std::ostringstream out;
  out << "epoch,mean_distance,std_distance,mean_sq_distance,bound_sq\n";
  for (std::size_t j = 0; j < res.epoch.size(); ++j) {
    row(out, {format_number(res.epoch[j]), format_number(res.distance[j].mean),
              format_number(res.distance[j].std), format_number(res.sq_distance[j].mean),
              format_number(res.bound_sq[j])});
  }
  return out.str();
}

std::string convergence_csv(const ConvergenceResult& res) {
  std::ostringstream out;
  out << "outer_step,mean_subopt,std_subopt,bound\n";
  for (std::size_t j = 0; j < res.outer_step.size(); ++j) {
    row(out, {std::to_string(res.outer_step[j]), format_number(res.subopt[j].mean),
              format_number(res.subopt[j].std), format_number(res.bound[j])});
  }
  return out.str();
}

std::string epr_csv(const EprResult& res) {
  std::ostringstream out;
  out << "n,mean_epr,std_epr,slope_to_date\n";
  for (const auto& p : res.points) {
    row(out, {std::to_string(p.n), format_number(p.excess.mean), format_number(p.excess.std),
              format_number(p.slope_to_date)});
  }
  return out.str();
}

std::string line_plot_svg(const PlotSeries& s) {
  constexpr double kWidth = 800, kHeight = 600;
  constexpr double kLeft = 80, kRight = 30, kTop = 50, kBottom = 60;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;

  auto xv = [&](double x) { return s.log_x ? std::log10(x) : x; };
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_hi = 0.0;
  double y_lo = 0.0;
  for (std::size_t j = 0; j < s.x.size(); ++j) {
    x_lo = std::min(x_lo, xv(s.x[j]));
    x_hi = std::max(x_hi, xv(s.x[j]));
    const double sd = j < s.std.size() ? s.std[j] : 0.0;
    y_hi = std::max(y_hi, s.mean[j] + sd);
    y_lo = std::min(y_lo, s.mean[j] - sd);
    if (j < s.bound.size() && std::isfinite(s.bound[j])) y_hi = std::max(y_hi, s.bound[j]);
  }
  if (s.x.empty()) {
    x_lo = 0.0;
    x_hi = 1.0;
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  auto px = [&](double x) { return kLeft + (xv(x) - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
      << escape(s.title) << "</text>\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(kLeft + pw)
      << "\" y2=\"" << fixed(kTop + ph) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft)
      << "\" y2=\"" << fixed(kTop + ph) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_lo + (x_hi - x_lo) * k / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * k / 4.0;
    const double tx = kLeft + pw * k / 4.0;
    const double ty = kTop + ph * (1.0 - k / 4.0);
    out << "<text x=\"" << fixed(tx) << "\" y=\"" << fixed(kTop + ph + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_number(s.log_x ? std::pow(10.0, fx) : fx).substr(0, 8) << "</text>\n";
    out << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(ty + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_number(fy).substr(0, 8) << "</text>\n";
  }
  out << "<text x=\"400\" y=\"590\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(s.x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "transform=\"rotate(-90 20 300)\">"
      << escape(s.y_label) << "</text>\n";

  if (!s.x.empty()) {
    out << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      const double sd = j < s.std.size() ? s.std[j] : 0.0;
      out << fixed(px(s.x[j])) << ',' << fixed(py(s.mean[j] + sd)) << ' ';
    }
    for (std::size_t j = s.x.size(); j-- > 0;) {
      const double sd = j < s.std.size() ? s.std[j] : 0.0;
      out << fixed(px(s.x[j])) << ',' << fixed(py(s.mean[j] - sd)) << ' ';
    }
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      out << fixed(px(s.x[j])) << ',' << fixed(py(s.mean[j])) << ' ';
    }
    out << "\"/>\n";
    std::ostringstream bound;
    for (std::size_t j = 0; j < s.bound.size() && j < s.x.size(); ++j) {
      if (std::isfinite(s.bound[j])) bound << fixed(px(s.x[j])) << ',' << fixed(py(s.bound[j])) << ' ';
    }
    if (!bound.str().empty()) {
      out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6,4\" points=\""
          << bound.str() << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

PlotSeries stability_series(const StabilityResult& res, const std::string& title) {
  PlotSeries s;
  s.title = title;
  s.x_label = "epoch";
  s.y_label = "squared distance";
  s.x = res.epoch;
  for (std::size_t j = 0; j < res.epoch.size(); ++j) {
    s.mean.push_back(res.sq_distance[j].mean);
    s.std.push_back(res.sq_distance[j].std);
  }
  s.bound = res.bound_sq;
  return s;
}

PlotSeries convergence_series(const ConvergenceResult& res, const std::string& title) {
  PlotSeries s;
  s.title = title;
  s.x_label = "outer step";
  s.y_label = "suboptimality";
  for (std::size_t j = 0; j < res.outer_step.size(); ++j) {
    s.x.push_back(static_cast<double>(res.outer_step[j]));
    s.mean.push_back(res.subopt[j].mean);
    s.std.push_back(res.subopt[j].std);
  }
  s.bound = res.bound;
  return s;
}

PlotSeries epr_series(const EprResult& res, const std::string& title) {
  PlotSeries s;
  s.title = title;
  s.x_label = "n";
  s.y_label = "excess population risk";
  s.log_x = true;
  for (const auto& p : res.points) {
    s.x.push_back(static_cast<double>(p.n));
    s.mean.push_back(p.excess.mean);
    s.std.push_back(p.excess.std);
  }
  return s;
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

std::vector<std::filesystem::path> emit_results(const std::filesystem::path& dir,
                                                const std::string& stem, const std::string& csv,
                                                const PlotSeries& plot) {
  return {write_file(dir, stem + ".csv", csv), write_file(dir, stem + ".svg", line_plot_svg(plot))};
}

}  // namespace vrstab
