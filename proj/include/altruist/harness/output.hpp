#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "altruist/harness/experiments.hpp"

namespace altruist::harness {

/// Creates `<root>/<command>-YYYYmmdd-HHMMSS[-n]` and returns it.
std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& command);

/// Writes `content` to `path` through a temporary file renamed into place.
/// Throws std::runtime_error when the path is not writable.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Rectangular table with row and column labels.
struct LabeledMatrix {
  std::string corner;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<double> values;  // row-major, NaN for missing

  double at(std::size_t r, std::size_t c) const { return values[r * col_labels.size() + c]; }
};

enum class MatrixField { AError, Crash, Distance };
LabeledMatrix matrix_table(const AdaptationMatrix& m, MatrixField field);

std::string matrix_csv(const LabeledMatrix& m);
/// Parses matrix_csv output; empty cells come back as NaN.
LabeledMatrix parse_matrix_csv(std::istream& in);

/// Heatmap with a logarithmic colour scale; values at or below zero are
/// drawn at the smallest positive value present.
std::string heatmap_svg(const LabeledMatrix& m, const std::string& title);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart; throws std::invalid_argument when there is nothing to draw.
std::string curves_svg(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label);

std::string episodes_csv(const std::vector<EpisodeMetrics>& episodes);
std::string aggregate_csv(const std::vector<std::pair<std::string, Aggregate>>& rows);
std::string training_log_csv(const std::vector<LearningCurve>& curves);
std::string sweep_csv(const std::vector<SweepPoint>& points);
std::string phi_csv(const std::vector<PhiPoint>& points);

}  // namespace altruist::harness
