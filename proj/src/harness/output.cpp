#include "altruist/harness/output.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "altruist/common/csv.hpp"

namespace altruist::harness {
namespace fs = std::filesystem;

namespace {

template <typename T>
void require_rows(const std::vector<T>& rows, const char* what) {
  if (rows.empty()) throw std::invalid_argument(std::string("no ") + what + " results to write");
}

}  // namespace

fs::path make_run_dir(const fs::path& root, const std::string& command) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream stamp;
  stamp << command << '-' << std::put_time(&tm, "%Y%m%d-%H%M%S");
  fs::create_directories(root);
  fs::path dir = root / stamp.str();
  for (int n = 1; fs::exists(dir); ++n) dir = root / (stamp.str() + "-" + std::to_string(n));
  fs::create_directory(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }
  fs::rename(tmp, path);
}

LabeledMatrix matrix_table(const AdaptationMatrix& m, MatrixField field) {
  LabeledMatrix t;
  t.corner = "train\\test";
  for (const Domain& d : m.rows) t.row_labels.push_back(domain_name(d));
  for (const Domain& d : m.cols) t.col_labels.push_back(domain_name(d));
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    for (std::size_t c = 0; c < m.cols.size(); ++c) {
      const CellMetrics& cell = m.cell(r, c);
      double v = std::nan("");
      if (field == MatrixField::AError) v = m.error(r, c);
      else if (cell.ok) v = field == MatrixField::Crash ? cell.crash_pct : cell.dt;
      t.values.push_back(v);
    }
  }
  return t;
}

std::string matrix_csv(const LabeledMatrix& m) {
  require_rows(m.values, "matrix");
  std::ostringstream out;
  std::vector<std::string> header{m.corner};
  header.insert(header.end(), m.col_labels.begin(), m.col_labels.end());
  write_csv_row(out, header);
  for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
    std::vector<std::string> row{m.row_labels[r]};
    for (std::size_t c = 0; c < m.col_labels.size(); ++c) row.push_back(format_double(m.at(r, c)));
    write_csv_row(out, row);
  }
  return out.str();
}

LabeledMatrix parse_matrix_csv(std::istream& in) {
  LabeledMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix CSV is empty");
  std::vector<std::string> header = parse_csv_row(line);
  m.corner = header.front();
  m.col_labels.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = parse_csv_row(line);
    if (f.size() != header.size()) throw std::runtime_error("matrix CSV row has the wrong width");
    m.row_labels.push_back(f.front());
    for (std::size_t i = 1; i < f.size(); ++i) m.values.push_back(f[i].empty() ? std::nan("") : std::stod(f[i]));
  }
  return m;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Viridis-like ramp through five anchor colours.
std::string ramp(double u) {
  static const double anchors[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  u = std::clamp(u, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(u));
  const double f = u - i;
  char buf[8];
  int rgb[3];
  for (int k = 0; k < 3; ++k) rgb[k] = static_cast<int>(std::lround(anchors[i][k] + f * (anchors[i + 1][k] - anchors[i][k])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

}  // namespace

std::string heatmap_svg(const LabeledMatrix& m, const std::string& title) {
  if (m.row_labels.empty() || m.col_labels.empty()) throw std::invalid_argument("heatmap of an empty matrix");
  double lo = INFINITY, hi = -INFINITY;
  for (double v : m.values) {
    if (std::isnan(v) || v <= 0.0) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = hi = 1.0;
  const double llo = std::log10(lo), lhi = std::log10(hi);

  const int cell = 56, left = 170, top = 60;
  const int width = left + cell * static_cast<int>(m.col_labels.size()) + 40;
  const int height = top + cell * static_cast<int>(m.row_labels.size()) + 150;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
    const int y = top + cell * static_cast<int>(r);
    s << "<text x=\"" << left - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\">"
      << xml_escape(m.row_labels[r]) << "</text>\n";
    for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
      const int x = left + cell * static_cast<int>(c);
      const double v = m.at(r, c);
      std::string fill = "#dddddd";
      if (!std::isnan(v)) {
        const double lv = std::log10(std::max(v, lo));
        fill = ramp(lhi > llo ? (lv - llo) / (lhi - llo) : 0.5);
      }
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
        << fill << "\" stroke=\"white\"/>\n";
      s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\" fill=\"white\">"
        << (std::isnan(v) ? "n/a" : fixed(v, 1)) << "</text>\n";
    }
  }
  const int label_y = top + cell * static_cast<int>(m.row_labels.size()) + 10;
  for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
    const int x = left + cell * static_cast<int>(c) + cell / 2;
    s << "<text transform=\"translate(" << x << "," << label_y << ") rotate(45)\">" << xml_escape(m.col_labels[c])
      << "</text>\n";
  }
  s << "<text x=\"" << left << "\" y=\"" << height - 12 << "\">log scale: " << fixed(lo, 3) << " .. " << fixed(hi, 3)
    << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string curves_svg(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                       const std::string& y_label) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const Series& sr : series) {
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if (std::isnan(sr.y[i])) continue;
      x0 = std::min(x0, sr.x[i]);
      x1 = std::max(x1, sr.x[i]);
      y0 = std::min(y0, sr.y[i]);
      y1 = std::max(y1, sr.y[i]);
    }
  }
  if (!std::isfinite(x0)) throw std::invalid_argument("curves_svg: no data");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const int w = 640, h = 400, left = 60, right = 140, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto px = [&](double x) { return left + pw * (x - x0) / (x1 - x0); };
  auto py = [&](double y) { return top + ph * (1.0 - (y - y0) / (y1 - y0)); };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left << "\" y=\"" << h - 30 << "\">" << fixed(x0, 2) << "</text>\n";
  s << "<text x=\"" << left + pw << "\" y=\"" << h - 30 << "\" text-anchor=\"end\">" << fixed(x1, 2) << "</text>\n";
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << xml_escape(x_label)
    << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">" << fixed(y0, 2) << "</text>\n";
  s << "<text x=\"" << left - 4 << "\" y=\"" << top + 8 << "\" text-anchor=\"end\">" << fixed(y1, 2) << "</text>\n";
  s << "<text transform=\"translate(14," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& sr = series[k];
    const char* color = colors[k % 8];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if (std::isnan(sr.y[i])) continue;
      s << fixed(px(sr.x[i]), 1) << ',' << fixed(py(sr.y[i]), 1) << ' ';
    }
    s << "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(k) + 8.0;
    s << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4 << "\">" << xml_escape(sr.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string episodes_csv(const std::vector<EpisodeMetrics>& episodes) {
  require_rows(episodes, "episode");
  std::ostringstream out;
  write_csv_row(out, {"episode", "seed", "crashed", "has_mission", "mission_failed", "distance_m", "reward_sum",
                      "interventions", "steps"});
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const EpisodeMetrics& e = episodes[i];
    write_csv_row(out, {std::to_string(i), std::to_string(e.seed), std::to_string(int(e.crashed)),
                        std::to_string(int(e.has_mission)), std::to_string(int(e.mission_failed)),
                        format_double(e.distance_traveled), format_double(e.reward_sum),
                        std::to_string(e.interventions), std::to_string(e.steps)});
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<std::pair<std::string, Aggregate>>& rows) {
  require_rows(rows, "aggregate");
  std::ostringstream out;
  write_csv_row(out, {"name", "episodes", "crash_pct", "mission_fail_pct", "dt_mean_m", "dt_stderr_m", "reward_mean",
                      "reward_stderr", "interventions_mean"});
  for (const auto& [name, a] : rows) {
    write_csv_row(out, {name, std::to_string(a.episodes), format_double(a.crash_pct), format_double(a.mission_fail_pct),
                        format_double(a.dt_mean), format_double(a.dt_stderr), format_double(a.reward_mean),
                        format_double(a.reward_stderr), format_double(a.interventions_mean)});
  }
  return out.str();
}

std::string training_log_csv(const std::vector<LearningCurve>& curves) {
  require_rows(curves, "training");
  std::ostringstream out;
  write_csv_row(out, {"run", "episode", "epsilon", "return", "crashed", "mission", "interventions", "gradient_steps",
                      "loss", "mission_smoothed", "return_smoothed"});
  for (const LearningCurve& c : curves) {
    for (std::size_t i = 0; i < c.log.size(); ++i) {
      const learn::EpisodeLog& l = c.log[i];
      write_csv_row(out, {c.name, std::to_string(l.episode), format_double(l.epsilon), format_double(l.ret),
                          std::to_string(l.crashes), std::to_string(l.mission), std::to_string(l.interventions),
                          std::to_string(l.gradient_steps), format_double(l.loss), format_double(c.mission[i]),
                          format_double(c.ret[i])});
    }
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  require_rows(points, "sweep");
  std::ostringstream out;
  write_csv_row(out, {"lateral", "longitudinal", "crash_social_pct", "crash_egoistic_pct", "dt_social_m",
                      "dt_egoistic_m", "crash_difference_pct", "pg_safety", "pg_efficiency_pct"});
  for (const SweepPoint& p : points) {
    write_csv_row(out, {format_double(p.lateral), format_double(p.longitudinal), format_double(p.social.crash_pct),
                        format_double(p.egoistic.crash_pct), format_double(p.social.dt_mean),
                        format_double(p.egoistic.dt_mean), format_double(p.crash_difference),
                        format_double(p.pg_safety), p.pg_efficiency ? format_double(*p.pg_efficiency) : ""});
  }
  return out.str();
}

std::string phi_csv(const std::vector<PhiPoint>& points) {
  require_rows(points, "phi");
  std::ostringstream out;
  write_csv_row(out, {"phi", "crash_pct", "mission_fail_pct", "dt_mean_m", "a_error_pct"});
  for (const PhiPoint& p : points) {
    write_csv_row(out, {format_double(p.phi), format_double(p.aggregate.crash_pct),
                        format_double(p.aggregate.mission_fail_pct), format_double(p.aggregate.dt_mean),
                        format_double(p.a_error)});
  }
  return out.str();
}

}  // namespace altruist::harness
