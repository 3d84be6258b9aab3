#pragma once

#include <chebfit/linalg/least_squares.hpp>
#include <chebfit/linalg/simplex.hpp>
#include <chebfit/linalg/types.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <vector>

namespace chebfit {

/// LP for min ||y - X b||_inf over variables [b (free), t >= 0]:
///   minimize t  s.t.  X b - t <= y,  -X b - t <= -y.
template <typename DerivedX, typename DerivedY>
LpProblem<typename DerivedX::Scalar> chebyshev_lp(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Index n = X.rows();
  const Index p = X.cols();
  if (y.size() != n) throw DimensionError("chebyshev lp: y length mismatch");
  LpProblem<Scalar> lp;
  lp.objective = VectorX<Scalar>::Zero(p + 1);
  lp.objective(p) = Scalar(1);
  lp.constraint_matrix.resize(2 * n, p + 1);
  lp.constraint_matrix.topLeftCorner(n, p) = X;
  lp.constraint_matrix.bottomLeftCorner(n, p) = -X;
  lp.constraint_matrix.col(p).setConstant(Scalar(-1));
  lp.rhs.resize(2 * n);
  lp.rhs.head(n) = y;
  lp.rhs.tail(n) = -y;
  lp.lower = VectorX<Scalar>::Constant(p + 1, -infinity<Scalar>());
  lp.lower(p) = Scalar(0);
  lp.upper = VectorX<Scalar>::Constant(p + 1, infinity<Scalar>());
  return lp;
}

struct QpConfig {
  double feas_tol = 1e-9;
  // 0 selects 20 * (n + p) + 100 working-set changes.
  Index max_iterations = 0;
  LpConfig lp{};
};

template <typename Scalar>
struct SlabQpResult {
  VectorX<Scalar> beta;
  SolveStatus status = SolveStatus::IterationLimit;
  Index iterations = 0;
  // max of scaled stationarity, primal violation and dual infeasibility.
  Scalar kkt_residual = Scalar(0);
  // Indices of active slab faces: i < n is x_i'b = y_i + a, i >= n is
  // x_{i-n}'b = y_{i-n} - a.
  std::vector<Index> active;
};

namespace detail {

template <typename Scalar>
struct SlabConstraints {
  const MatrixX<Scalar>& X;
  const VectorX<Scalar>& y;
  Scalar a;

  Index count() const { return 2 * X.rows(); }
  Scalar sign(Index j) const { return j < X.rows() ? Scalar(1) : Scalar(-1); }
  Index row(Index j) const { return j < X.rows() ? j : j - X.rows(); }
  // g_j' b <= h_j
  Scalar lhs(Index j, const VectorX<Scalar>& b) const {
    return sign(j) * X.row(row(j)).dot(b);
  }
  Scalar rhs(Index j) const { return sign(j) * y(row(j)) + a; }
};

}  // namespace detail

/// Primal active-set method for
///   min (1/n) ||y - X b||^2  s.t.  y_i - a <= x_i' b <= y_i + a,
/// started from a feasible point `start`.
template <typename Scalar>
SlabQpResult<Scalar> solve_qp_box_slab_from(const MatrixX<Scalar>& X,
                                            const VectorX<Scalar>& y, Scalar a,
                                            const VectorX<Scalar>& start,
                                            const QpConfig& config = {}) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (y.size() != n || start.size() != p) {
    throw DimensionError("slab qp: dimension mismatch");
  }
  require_full_column_rank(X);
  const detail::SlabConstraints<Scalar> cons{X, y, a};
  const Scalar ftol = Scalar(config.feas_tol);
  for (Index j = 0; j < cons.count(); ++j) {
    if (cons.lhs(j, start) > cons.rhs(j) + ftol) {
      throw InfeasibleError("slab qp: start point violates the slab");
    }
  }

  const Index max_iter =
      config.max_iterations > 0 ? config.max_iterations : 20 * (n + p) + 100;
  SlabQpResult<Scalar> out;
  VectorX<Scalar> beta = start;
  std::vector<Index> work;
  std::vector<char> in_work(static_cast<std::size_t>(cons.count()), 0);
  const Scalar xscale = std::max(Scalar(1), X.cwiseAbs().maxCoeff());

  auto constraint_rows = [&]() {
    MatrixX<Scalar> Ct(p, static_cast<Index>(work.size()));
    for (std::size_t c = 0; c < work.size(); ++c) {
      Ct.col(static_cast<Index>(c)) =
          cons.sign(work[c]) * X.row(cons.row(work[c])).transpose();
    }
    return Ct;
  };

  VectorX<Scalar> mu;
  for (Index it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    const VectorX<Scalar> r = y - X * beta;
    const Index w = static_cast<Index>(work.size());
    VectorX<Scalar> step = VectorX<Scalar>::Zero(p);
    MatrixX<Scalar> Ct;
    Eigen::HouseholderQR<MatrixX<Scalar>> qr;
    if (w > 0) {
      Ct = constraint_rows();
      qr.compute(Ct);
    }
    if (w == 0) {
      step = solve_least_squares(X, r);
    } else if (w < p) {
      const MatrixX<Scalar> Q = qr.householderQ();
      const MatrixX<Scalar> Z = Q.rightCols(p - w);
      const VectorX<Scalar> u = solve_least_squares(MatrixX<Scalar>(X * Z), r);
      step = Z * u;
    }

    if (step.cwiseAbs().maxCoeff() <=
        Scalar(1e-12) * (Scalar(1) + beta.cwiseAbs().maxCoeff())) {
      // Stationary on the working face: check multiplier signs.
      const VectorX<Scalar> grad = X.transpose() * r;  // = C' mu at optimum
      if (w == 0) {
        mu.resize(0);
        out.status = SolveStatus::Optimal;
        break;
      }
      const MatrixX<Scalar> Q = qr.householderQ();
      const VectorX<Scalar> qtg = Q.transpose() * grad;
      mu = qr.matrixQR()
               .topLeftCorner(w, w)
               .template triangularView<Eigen::Upper>()
               .solve(qtg.head(w));
      Index worst = 0;
      const Scalar mu_min = mu.minCoeff(&worst);
      const Scalar mu_tol = Scalar(1e-10) * (Scalar(1) + grad.cwiseAbs().maxCoeff());
      if (mu_min >= -mu_tol) {
        out.status = SolveStatus::Optimal;
        break;
      }
      in_work[work[worst]] = 0;
      work.erase(work.begin() + worst);
      continue;
    }

    Scalar alpha = Scalar(1);
    Index blocking = -1;
    for (Index j = 0; j < cons.count(); ++j) {
      if (in_work[j]) continue;
      const Scalar gs = cons.lhs(j, step);
      if (gs <= Scalar(1e-14) * xscale) continue;
      const Scalar gap = std::max(Scalar(0), cons.rhs(j) - cons.lhs(j, beta));
      const Scalar t = gap / gs;
      if (t < alpha) {
        alpha = t;
        blocking = j;
      }
    }
    beta += alpha * step;
    if (blocking >= 0) {
      work.push_back(blocking);
      in_work[blocking] = 1;
    }
  }

  // KKT residual for the (1/n)-scaled objective.
  const VectorX<Scalar> r = y - X * beta;
  VectorX<Scalar> station = X.transpose() * r;
  Scalar dual_inf = Scalar(0);
  for (std::size_t c = 0; c < work.size() && static_cast<Index>(c) < mu.size();
       ++c) {
    const Scalar m = mu(static_cast<Index>(c));
    dual_inf = std::max(dual_inf, -m);
    station -= std::max(m, Scalar(0)) * cons.sign(work[c]) *
               X.row(cons.row(work[c])).transpose();
  }
  Scalar primal = Scalar(0);
  for (Index j = 0; j < cons.count(); ++j) {
    primal = std::max(primal, cons.lhs(j, beta) - cons.rhs(j));
  }
  const Scalar scale = Scalar(2) / Scalar(n);
  out.kkt_residual = std::max({scale * station.cwiseAbs().maxCoeff(),
                               scale * dual_inf, std::max(primal, Scalar(0))});
  out.beta = beta;
  out.active = work;
  return out;
}

/// Constrained least squares over the residual slab, warm-started at the
/// Chebyshev (minimax) fit, which is feasible whenever the slab is nonempty.
/// Throws InfeasibleError when the minimax radius exceeds `a`.
template <typename Scalar>
SlabQpResult<Scalar> solve_qp_box_slab(const MatrixX<Scalar>& X,
                                       const VectorX<Scalar>& y, Scalar a,
                                       const QpConfig& config = {}) {
  if (!(a >= Scalar(0)) || !std::isfinite(a)) {
    throw InvalidInputError("slab qp: radius must be finite and >= 0");
  }
  require_full_column_rank(X);
  const LpSolution<Scalar> lp = solve_lp(chebyshev_lp(X, y), config.lp);
  if (lp.status != SolveStatus::Optimal) {
    throw InfeasibleError(std::string("slab qp: minimax phase ended ") +
                          to_string(lp.status));
  }
  const VectorX<Scalar> start = lp.x.head(X.cols());
  const Scalar radius = (y - X * start).cwiseAbs().maxCoeff();
  if (radius > a + Scalar(config.feas_tol)) {
    throw InfeasibleError("slab qp: slab is empty (minimax radius " +
                          std::to_string(static_cast<double>(radius)) +
                          " exceeds a)");
  }
  return solve_qp_box_slab_from(X, y, a, start, config);
}

}  // namespace chebfit
