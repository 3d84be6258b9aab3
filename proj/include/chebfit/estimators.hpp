#pragma once

#include <chebfit/linalg.hpp>
#include <chebfit/model.hpp>

#include <span>
#include <vector>

namespace chebfit {

struct IrlsConfig {
  Index max_iters = 500;
  double weight_floor = 1e-12;
  double convergence_tol = 1e-10;  // on the change of ||r||_inf
};

struct LassoConfig {
  double lambda = 0.0;
  Index max_iters = 10000;  // sweeps for coordinate descent
  double tol = 1e-9;        // on the largest scaled coefficient change
};

/// Options for a coordinate-descent LASSO path.
struct LassoPathConfig {
  Index max_iters = 10000;
  double tol = 1e-9;
  // Stop the path early once the fit explains at least this fraction of
  // sum(y^2), or once that fraction grows by less than `min_dev_change`
  // between consecutive penalties.
  bool early_stop = true;
  double max_dev_ratio = 0.999;
  double min_dev_change = 1e-5;
};

/// argmin_b ||y - X b||_inf via the LP  min a  s.t.  -a <= y - X b <= a.
/// Rank-deficient X throws RankDeficientError; solver failures are reported
/// in FitResult::status.
FitResult fit_chebyshev_lp(const Dataset& ds, const LpConfig& config = {});

/// Lawson's iteratively reweighted least squares for the same problem.
/// Every few sweeps the minimax problem is solved exactly on the heavily
/// weighted points; when that fit is feasible for all points it is returned.
FitResult fit_chebyshev_irls(const Dataset& ds, const IrlsConfig& config = {});

/// Least squares over the residual slab ||y - X b||_inf <= a.
/// Throws InfeasibleError when the slab is empty.
FitResult fit_constrained_ls(const Dataset& ds, double a, const QpConfig& config = {});

/// min a + lambda ||b||_1  s.t.  -a <= y - X b <= a, as an LP in (b+, b-, a).
FitResult fit_chebyshev_lasso(const Dataset& ds, const LassoConfig& config,
                              const LpConfig& lp = {});

/// Solves for every lambda in `lambdas`, warm-starting the simplex from large
/// to small penalties. Results are returned in the order of `lambdas`.
std::vector<FitResult> fit_chebyshev_lasso_path(const Dataset& ds,
                                                std::span<const double> lambdas,
                                                const LpConfig& lp = {});

/// (1/(2n)) ||y - X b||^2 + lambda ||b||_1 by cyclic coordinate descent.
FitResult fit_lasso_cd(const Dataset& ds, const LassoConfig& config);

/// Coordinate-descent fits along `lambdas` (processed in the given order with
/// warm starts; pass them in decreasing order). With early stopping the
/// result may be shorter than `lambdas`.
std::vector<FitResult> fit_lasso_cd_path(const Dataset& ds, std::span<const double> lambdas,
                                         const LassoPathConfig& config = {});

/// ||X'y||_inf / n, the smallest penalty with an all-zero LASSO solution.
double lasso_lambda_max(const Dataset& ds);

/// `count` log-spaced penalties from lambda_max down to ratio * lambda_max.
std::vector<double> lasso_lambda_grid(const Dataset& ds, Index count = 100,
                                      double ratio = 1e-4);

double lasso_objective(const Dataset& ds, const Vector& beta, double lambda);

/// Largest violation of the LASSO subgradient optimality conditions.
double lasso_kkt_residual(const Dataset& ds, const Vector& beta, double lambda);

/// Ordinary least squares; a_hat is the largest absolute residual.
FitResult fit_ols(const Dataset& ds);

}  // namespace chebfit
