#pragma once

#include <chebfit/linalg/types.hpp>

#include <Eigen/QR>

#include <cmath>

namespace chebfit {

// Relative rank threshold: a Householder R diagonal entry at or below
// kRankTol * max|X_ij| marks its column as numerically dependent.
inline constexpr double kRankTol = 1e-12;

/// Index of the first numerically dependent column of X, or -1 when X has
/// full column rank. Requires rows >= cols to report full rank.
template <typename Derived>
Index first_deficient_column(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  if (X.cols() == 0) return -1;
  const Scalar scale = X.cwiseAbs().maxCoeff();
  if (!(scale > Scalar(0))) return 0;
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(X);
  const Index diag = std::min(X.rows(), X.cols());
  const auto& R = qr.matrixQR();
  const Scalar tol = Scalar(kRankTol) * scale;
  for (Index j = 0; j < diag; ++j) {
    if (std::abs(R(j, j)) <= tol) return j;
  }
  return X.rows() < X.cols() ? X.rows() : -1;
}

template <typename Derived>
void require_full_column_rank(const Eigen::MatrixBase<Derived>& X) {
  const Index bad = first_deficient_column(X);
  if (bad >= 0) throw RankDeficientError(bad);
}

/// argmin ||y - X b||_2 by Householder QR.
///
/// Throws RankDeficientError naming the first column whose R diagonal falls
/// below the rank threshold, and DimensionError on shape mismatch.
template <typename DerivedX, typename DerivedY>
VectorX<typename DerivedX::Scalar> solve_least_squares(
    const Eigen::MatrixBase<DerivedX>& X,
    const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (X.rows() != y.size()) {
    throw DimensionError("least squares: X has " + std::to_string(X.rows()) +
                         " rows but y has " + std::to_string(y.size()));
  }
  if (X.cols() < 1 || X.rows() < 1) {
    throw DimensionError("least squares: empty design");
  }
  if (!all_finite(X) || !all_finite(y)) {
    throw InvalidInputError("least squares: non-finite input");
  }
  const Scalar scale = X.cwiseAbs().maxCoeff();
  if (!(scale > Scalar(0))) throw RankDeficientError(0);

  Eigen::HouseholderQR<MatrixX<Scalar>> qr(X);
  const Index p = X.cols();
  if (X.rows() < p) throw RankDeficientError(X.rows());
  const auto& R = qr.matrixQR();
  const Scalar tol = Scalar(kRankTol) * scale;
  for (Index j = 0; j < p; ++j) {
    if (std::abs(R(j, j)) <= tol) throw RankDeficientError(j);
  }
  VectorX<Scalar> qty = qr.householderQ().adjoint() * y;
  return R.topLeftCorner(p, p)
      .template triangularView<Eigen::Upper>()
      .solve(qty.head(p));
}

/// Weighted variant: argmin sum_i w_i (y_i - x_i' b)^2 with w_i > 0.
template <typename DerivedX, typename DerivedY, typename DerivedW>
VectorX<typename DerivedX::Scalar> solve_weighted_least_squares(
    const Eigen::MatrixBase<DerivedX>& X,
    const Eigen::MatrixBase<DerivedY>& y,
    const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedX::Scalar;
  if (w.size() != X.rows()) {
    throw DimensionError("weighted least squares: weight length mismatch");
  }
  const VectorX<Scalar> root = w.cwiseSqrt();
  const MatrixX<Scalar> Xw = root.asDiagonal() * X;
  const VectorX<Scalar> yw = root.cwiseProduct(y);
  return solve_least_squares(Xw, yw);
}

}  // namespace chebfit
