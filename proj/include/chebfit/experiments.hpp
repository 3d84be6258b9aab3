#pragma once

#include <chebfit/designs.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chebfit {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

enum class ExperimentKind { RateCurve, LassoCompare, OlsVsCheb, Containment, BoundCheck };

const char* to_string(ExperimentKind kind);

/// Six equispaced penalties in [low, high] * sqrt(log p / n^exponent).
struct LambdaGridSpec {
  Index count = 6;
  double low_mult = 0.1;
  double high_mult = 2.0;
  double exponent = 0.4;
};

std::vector<double> chebyshev_lasso_grid(const LambdaGridSpec& spec, Index n, Index p);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::RateCurve;
  // gaussian (equicorrelated with `design_rho`), rademacher, sphere,
  // orthonormal (identity basis) or cauchy.
  std::string design_family = "gaussian";
  double design_rho = 0.0;
  double a = 2.0;  // uniform noise radius
  std::vector<Index> n_grid;
  std::vector<Index> p_grid;
  std::vector<Index> s_grid;
  std::vector<Index> m_grid;
  Index p_offset = 1000;  // lasso-compare uses p = p_offset + s
  Index reps = 100;
  std::uint64_t seed = 1;
  LambdaGridSpec lambda_grid;
  Index lasso_count = 100;
  double lasso_ratio = 1e-4;
  std::optional<double> xi;  // containment radius; defaults to the family's value
  Index directions = 0;      // 0 selects 20000 p
  double gamma = 0.1;
  double L = 3.0;
  bool record_timing = false;
  double cell_budget_ms = 0.0;  // 0 disables the budget
  std::filesystem::path output_dir = "out";
};

/// Parses the sectioned `key = value` format (see README). Throws ConfigError
/// with the line number on any problem.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical `key = value` rendering; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& cfg);
/// FNV-1a of to_text(cfg).
std::uint64_t config_hash(const ExperimentConfig& cfg);

DesignSpec design_for(const ExperimentConfig& cfg, Index p);

struct ExperimentRecord {
  Index n = 0;
  Index p = 0;
  Index s = 0;
  Index rep = 0;
  std::string estimator;
  double l2_error = 0.0;
  double l1_error = 0.0;
  double a_hat = 0.0;
  double lambda_used = 0.0;
  double wall_ms = 0.0;
};

struct CellSummary {
  Index n = 0;
  Index p = 0;
  Index s = 0;
  std::string estimator;
  double x = 0.0;  // regression abscissa where one applies
  double mean_l2 = 0.0;
  double mean_l1 = 0.0;
  double se_l2 = 0.0;
  double se_l1 = 0.0;
  Index count = 0;
  std::string status = "ok";
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least-squares line through (x, y); needs two distinct x values.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct RunResult {
  std::vector<ExperimentRecord> records;
  std::vector<CellSummary> cells;
  // Regression of the summary (rate: mean l2 on x; ols-vs-cheb: one per
  // estimator on log-log axes).
  std::vector<std::pair<std::string, LineFit>> fits;
  std::string x_axis;
  // Critical-inequality diagnostics for Chebyshev fits.
  double min_critical_slack = infinity<double>();
  double max_a_hat_excess = -infinity<double>();
  // Cells aborted by a solver failure or the time budget.
  Index failed_cells = 0;
};

RunResult run_rate_curve(const ExperimentConfig& cfg, int jobs = 1);
RunResult run_ols_vs_cheb(const ExperimentConfig& cfg, int jobs = 1);
RunResult run_lasso_compare(const ExperimentConfig& cfg, int jobs = 1);

struct ContainmentRow {
  std::string design;
  Index p = 0;
  Index m = 0;
  double xi = 0.0;
  double failure = 0.0;
  double std_error = 0.0;
  double bound = 1.0;
  bool exact = true;
};

std::vector<ContainmentRow> run_containment(const ExperimentConfig& cfg, int jobs = 1);

struct BoundCheckRow {
  std::string design;
  Index p = 0;
  Index n = 0;
  double mean_error = 0.0;
  double quantile_error = 0.0;  // at 1 - failure_probability
  double bound = 0.0;
  double failure_probability = 0.0;
  bool holds = false;
};

std::vector<BoundCheckRow> run_bound_check(const ExperimentConfig& cfg, int jobs = 1);

// Output.

std::string records_csv(const std::vector<ExperimentRecord>& records);
/// Throws InvalidInputError for an empty record set.
void emit_csv(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);
std::vector<ExperimentRecord> read_records_csv(const std::filesystem::path& path);

std::string summary_csv(const std::vector<CellSummary>& cells);
std::string containment_csv(const std::vector<ContainmentRow>& rows);
std::string bound_check_csv(const std::vector<BoundCheckRow>& rows);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Scatter plot with a least-squares line and its slope/R^2 in the corner.
std::string svg_scatter(const std::vector<ScatterPoint>& points, std::string_view x_label,
                        std::string_view y_label);
void emit_svg_scatter(const std::vector<ScatterPoint>& points, std::string_view x_label,
                      std::string_view y_label, const std::filesystem::path& path);

/// Writes every artifact of `cfg`'s experiment under cfg.output_dir and
/// returns the number of failed cells.
Index run_experiment(const ExperimentConfig& cfg, int jobs = 1);

}  // namespace chebfit
