#pragma once

#include "vrstab/harness.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrstab {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that reads back to the same double; "nan" for NaN.
std::string format_number(double x);

std::string stability_csv(const StabilityResult& res);
std::string convergence_csv(const ConvergenceResult& res);
std::string epr_csv(const EprResult& res);

/// One curve with a ±std band and an optional bound line (NaN entries are
/// left out of the bound line).
struct PlotSeries {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<double> bound;
  bool log_x = false;
};

/// 800×600 standalone SVG.
std::string line_plot_svg(const PlotSeries& series);

PlotSeries stability_series(const StabilityResult& res, const std::string& title);
PlotSeries convergence_series(const ConvergenceResult& res, const std::string& title);
PlotSeries epr_series(const EprResult& res, const std::string& title);

/// Creates `dir` if needed and writes `content` to dir/name.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content);

/// Writes stem.csv and stem.svg; returns both paths.
std::vector<std::filesystem::path> emit_results(const std::filesystem::path& dir,
                                                const std::string& stem, const std::string& csv,
                                                const PlotSeries& plot);

}  // namespace vrstab
