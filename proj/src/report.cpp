#include <chebfit/csv.hpp>
#include <chebfit/experiments.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#ifndef CHEBFIT_VERSION
#define CHEBFIT_VERSION "unknown"
#endif

namespace chebfit {

namespace {

using csv::format_real;

constexpr const char* kRecordHeader = "n,p,s,rep,estimator,l2_error,l1_error,a_hat,lambda,wall_ms";

// Short fixed-format number for plot labels.
std::string label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void write_fits(const RunResult& res, const std::filesystem::path& path) {
  std::ostringstream o;
  o << "estimator,x_axis,slope,intercept,r2\n";
  for (const auto& [est, f] : res.fits) {
    o << est << "," << res.x_axis << "," << format_real(f.slope) << ","
      << format_real(f.intercept) << "," << format_real(f.r2) << "\n";
  }
  csv::write_text(path, o.str());
}

void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream o;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  o << "chebfit_version = " << CHEBFIT_VERSION << "\n"
    << "eigen_version = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
    << EIGEN_MINOR_VERSION << "\n"
    << "experiment = " << to_string(cfg.experiment) << "\n"
    << "config_hash = " << hash << "\n"
    << "seed = " << cfg.seed << "\n";
  for (const auto& [k, v] : extra) o << k << " = " << v << "\n";
  o << "\n# effective configuration\n";
  ExperimentConfig shown = cfg;
  shown.output_dir.clear();
  o << to_text(shown);
  csv::write_text(dir / "manifest.txt", o.str());
}

}  // namespace

std::string records_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream o;
  o << kRecordHeader << "\n";
  for (const auto& r : records) {
    o << r.n << "," << r.p << "," << r.s << "," << r.rep << "," << r.estimator << ","
      << format_real(r.l2_error) << "," << format_real(r.l1_error) << "," << format_real(r.a_hat)
      << "," << format_real(r.lambda_used) << "," << format_real(r.wall_ms) << "\n";
  }
  return o.str();
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw InvalidInputError("no records to write to " + path.string());
  csv::write_text(path, records_csv(records));
}

std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  std::string header;
  for (std::size_t i = 0; i < t.header.size(); ++i) header += (i ? "," : "") + t.header[i];
  if (header != kRecordHeader) throw InvalidInputError(path.string() + ": unexpected record header");
  std::vector<ExperimentRecord> out;
  const std::string ctx = path.string();
  for (const auto& row : t.rows) {
    if (row.size() != 10) throw InvalidInputError(ctx + ": wrong field count");
    ExperimentRecord r;
    r.n = static_cast<Index>(csv::parse_integer(row[0], ctx));
    r.p = static_cast<Index>(csv::parse_integer(row[1], ctx));
    r.s = static_cast<Index>(csv::parse_integer(row[2], ctx));
    r.rep = static_cast<Index>(csv::parse_integer(row[3], ctx));
    r.estimator = row[4];
    r.l2_error = csv::parse_real(row[5], ctx);
    r.l1_error = csv::parse_real(row[6], ctx);
    r.a_hat = csv::parse_real(row[7], ctx);
    r.lambda_used = csv::parse_real(row[8], ctx);
    r.wall_ms = csv::parse_real(row[9], ctx);
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_csv(const std::vector<CellSummary>& cells) {
  std::ostringstream o;
  o << "n,p,s,estimator,x,mean_l2_error,se_l2_error,mean_l1_error,se_l1_error,reps,status\n";
  for (const auto& c : cells) {
    o << c.n << "," << c.p << "," << c.s << "," << c.estimator << "," << format_real(c.x) << ","
      << format_real(c.mean_l2) << "," << format_real(c.se_l2) << "," << format_real(c.mean_l1)
      << "," << format_real(c.se_l1) << "," << c.count << "," << c.status << "\n";
  }
  return o.str();
}

std::string containment_csv(const std::vector<ContainmentRow>& rows) {
  std::ostringstream o;
  o << "design,p,m,xi,failure,std_error,bound,exact\n";
  for (const auto& r : rows) {
    o << r.design << "," << r.p << "," << r.m << "," << format_real(r.xi) << ","
      << format_real(r.failure) << "," << format_real(r.std_error) << "," << format_real(r.bound)
      << "," << (r.exact ? 1 : 0) << "\n";
  }
  return o.str();
}

std::string bound_check_csv(const std::vector<BoundCheckRow>& rows) {
  std::ostringstream o;
  o << "design,p,n,mean_error,quantile_error,bound,failure_probability,holds\n";
  for (const auto& r : rows) {
    o << r.design << "," << r.p << "," << r.n << "," << format_real(r.mean_error) << ","
      << format_real(r.quantile_error) << "," << format_real(r.bound) << ","
      << format_real(r.failure_probability) << "," << (r.holds ? 1 : 0) << "\n";
  }
  return o.str();
}

std::string svg_scatter(const std::vector<ScatterPoint>& points, std::string_view x_label,
                        std::string_view y_label) {
  if (points.empty()) throw InvalidInputError("scatter plot needs at least one point");
  constexpr double W = 640, H = 480, left = 70, right = 20, top = 20, bottom = 60;
  double x0 = points[0].x, x1 = x0, y0 = points[0].y, y1 = y0;
  for (const auto& q : points) {
    x0 = std::min(x0, q.x);
    x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y);
    y1 = std::max(y1, q.y);
  }
  const double padx = x1 > x0 ? 0.05 * (x1 - x0) : 1.0;
  const double pady = y1 > y0 ? 0.05 * (y1 - y0) : 1.0;
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  const auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  const auto sy = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n"
    << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
    << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(H - bottom) << "\" x2=\""
    << coord(W - right) << "\" y2=\"" << coord(H - bottom) << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left)
    << "\" y2=\"" << coord(H - bottom) << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << coord(sx(xv)) << "\" y=\"" << coord(H - bottom + 18)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << label(xv) << "</text>\n"
      << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(sy(yv) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << label(yv) << "</text>\n";
  }
  o << "<text x=\"" << coord((left + W - right) / 2) << "\" y=\"" << coord(H - 15)
    << "\" font-size=\"13\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n"
    << "<text x=\"15\" y=\"" << coord((top + H - bottom) / 2)
    << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
    << coord((top + H - bottom) / 2) << ")\">" << xml_escape(y_label) << "</text>\n";

  std::vector<double> xs, ys;
  for (const auto& q : points) {
    xs.push_back(q.x);
    ys.push_back(q.y);
  }
  bool distinct = false;
  for (double x : xs) distinct |= x != xs.front();
  if (distinct) {
    const LineFit f = fit_line(xs, ys);
    const double lo = *std::min_element(xs.begin(), xs.end());
    const double hi = *std::max_element(xs.begin(), xs.end());
    o << "<line x1=\"" << coord(sx(lo)) << "\" y1=\"" << coord(sy(f.intercept + f.slope * lo))
      << "\" x2=\"" << coord(sx(hi)) << "\" y2=\"" << coord(sy(f.intercept + f.slope * hi))
      << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n"
      << "<text x=\"" << coord(left + 10) << "\" y=\"" << coord(top + 14)
      << "\" font-size=\"12\">slope = " << label(f.slope) << ", R^2 = " << label(f.r2)
      << "</text>\n";
  }
  for (const auto& q : points) {
    o << "<circle cx=\"" << coord(sx(q.x)) << "\" cy=\"" << coord(sy(q.y))
      << "\" r=\"3\" fill=\"black\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_svg_scatter(const std::vector<ScatterPoint>& points, std::string_view x_label,
                      std::string_view y_label, const std::filesystem::path& path) {
  csv::write_text(path, svg_scatter(points, x_label, y_label));
}

Index run_experiment(const ExperimentConfig& cfg, int jobs) {
  const auto& dir = cfg.output_dir;
  switch (cfg.experiment) {
    case ExperimentKind::RateCurve:
    case ExperimentKind::OlsVsCheb:
    case ExperimentKind::LassoCompare: {
      const RunResult res = cfg.experiment == ExperimentKind::RateCurve ? run_rate_curve(cfg, jobs)
                            : cfg.experiment == ExperimentKind::OlsVsCheb
                                ? run_ols_vs_cheb(cfg, jobs)
                                : run_lasso_compare(cfg, jobs);
      if (!res.records.empty()) emit_csv(res.records, dir / "records.csv");
      csv::write_text(dir / "summary.csv", summary_csv(res.cells));
      std::vector<std::pair<std::string, std::string>> extra = {
          {"records", std::to_string(res.records.size())},
          {"failed_cells", std::to_string(res.failed_cells)}};
      if (cfg.experiment != ExperimentKind::LassoCompare) {
        write_fits(res, dir / "fit.csv");
        for (const auto& [est, f] : res.fits) {
          std::vector<ScatterPoint> pts;
          for (const auto& c : res.cells) {
            if (c.estimator != est || c.status != "ok") continue;
            if (cfg.experiment == ExperimentKind::RateCurve) {
              pts.push_back({c.x, c.mean_l2});
            } else {
              pts.push_back({std::log(c.x), std::log(c.mean_l2)});
            }
          }
          const bool rate = cfg.experiment == ExperimentKind::RateCurve;
          emit_svg_scatter(pts, rate ? res.x_axis : "log n",
                           rate ? "mean l2 error" : "log mean l2 error",
                           dir / ("plot_" + est + ".svg"));
          extra.emplace_back("slope_" + est, format_real(f.slope));
          extra.emplace_back("r2_" + est, format_real(f.r2));
        }
        if (std::isfinite(res.min_critical_slack)) {
          extra.emplace_back("min_critical_slack", format_real(res.min_critical_slack));
          extra.emplace_back("max_a_hat_excess", format_real(res.max_a_hat_excess));
        }
      }
      write_manifest(cfg, dir, extra);
      return res.failed_cells;
    }
    case ExperimentKind::Containment: {
      const auto rows = run_containment(cfg, jobs);
      csv::write_text(dir / "containment.csv", containment_csv(rows));
      write_manifest(cfg, dir, {{"rows", std::to_string(rows.size())}});
      return 0;
    }
    case ExperimentKind::BoundCheck: {
      const auto rows = run_bound_check(cfg, jobs);
      csv::write_text(dir / "bound_check.csv", bound_check_csv(rows));
      const auto held = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.holds; });
      write_manifest(cfg, dir, {{"rows", std::to_string(rows.size())},
                                {"rows_within_bound", std::to_string(held)}});
      return 0;
    }
  }
  return 0;
}

}  // namespace chebfit
