#pragma once

#include <chebfit/linalg/types.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chebfit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ground truth of a simulated instance: y = X beta_star + eps, |eps_i| <= a.
struct Truth {
  Vector beta_star;
  double a = 0.0;
  Vector eps;
};

/// Regression instance (X, y) with an optional truth payload.
class Dataset {
 public:
  Dataset(Matrix X, Vector y);
  Dataset(Matrix X, Vector y, Truth truth);

  const Matrix& X() const noexcept { return X_; }
  const Vector& y() const noexcept { return y_; }
  const std::optional<Truth>& truth() const noexcept { return truth_; }
  bool has_truth() const noexcept { return truth_.has_value(); }
  // Throws InvalidInputError when no truth is attached.
  const Truth& require_truth() const;

  Index n() const noexcept { return X_.rows(); }
  Index p() const noexcept { return X_.cols(); }

 private:
  Matrix X_;
  Vector y_;
  std::optional<Truth> truth_;
};

enum class Estimator {
  ChebyshevLp,
  ChebyshevIrls,
  ConstrainedLs,
  ChebyshevLasso,
  LassoCd,
  Ols,
};

// Short stable label used in CSV output and on the command line.
const char* tag(Estimator e);
std::optional<Estimator> estimator_from_tag(std::string_view tag);

struct FitResult {
  Vector beta_hat;
  double a_hat = 0.0;  // ||residuals||_inf
  Vector residuals;
  Estimator estimator = Estimator::ChebyshevLp;
  Index iterations = 0;
  SolveStatus status = SolveStatus::Optimal;
  double lambda = 0.0;  // penalty level for penalized fits
};

/// Slacks of the per-observation inequalities
///   eta_i x_i'(beta_hat - beta_star) <= a - |eps_i|,  eta_i = -sign(eps_i),
/// which hold for every beta_hat inside the residual slab of radius a.
struct CriticalInequalityReport {
  Vector eta;
  Vector slack;
  // Observation indices ordered by decreasing |eps_i|.
  std::vector<Index> order;

  double min_slack() const;
  // The K observations with the largest |eps_i|.
  std::vector<Index> critical(Index K) const;
};

/// y - X beta.
Vector residuals(const Dataset& ds, const Vector& beta);

/// ||y - X beta||_inf <= a + 1e-9.
bool check_feasible(const Dataset& ds, const Vector& beta, double a);

/// Requires a truth payload; sign(0) is taken as +1 so eta(0) = -1.
CriticalInequalityReport critical_report(const Dataset& ds, const Vector& beta_hat);

/// Writes `y,x1,...,xp` and, when truth is present, the sidecar returned by
/// truth_sidecar_path() in long form `kind,index,value`.
void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path);

/// Reads a dataset written by write_dataset_csv (sidecar optional).
Dataset read_dataset_csv(const std::filesystem::path& path);

std::filesystem::path truth_sidecar_path(const std::filesystem::path& data_path);

}  // namespace chebfit
