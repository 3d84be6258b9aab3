#include <chebfit/estimators.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Jacobi>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>

namespace chebfit {

namespace {

FitResult make_result(const Dataset& ds, Vector beta, Estimator tag) {
  FitResult out;
  out.residuals = ds.y() - ds.X() * beta;
  out.a_hat = out.residuals.cwiseAbs().maxCoeff();
  out.beta_hat = std::move(beta);
  out.estimator = tag;
  return out;
}

// Variables (b+, b-, a) with constraints [X -X -1] <= y and [-X X -1] <= -y.
LpProblem<double> chebyshev_lasso_lp(const Dataset& ds, double lambda) {
  const Index n = ds.n();
  const Index p = ds.p();
  LpProblem<double> lp;
  lp.objective = Vector::Constant(2 * p + 1, lambda);
  lp.objective(2 * p) = 1.0;
  lp.constraint_matrix.resize(2 * n, 2 * p + 1);
  lp.constraint_matrix.topLeftCorner(n, p) = ds.X();
  lp.constraint_matrix.block(0, p, n, p) = -ds.X();
  lp.constraint_matrix.bottomLeftCorner(n, p) = -ds.X();
  lp.constraint_matrix.block(n, p, n, p) = ds.X();
  lp.constraint_matrix.col(2 * p).setConstant(-1.0);
  lp.rhs.resize(2 * n);
  lp.rhs << ds.y(), -ds.y();
  lp.lower = Vector::Zero(2 * p + 1);
  lp.upper = Vector::Constant(2 * p + 1, infinity<double>());
  return lp;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInputError("lambda must be finite and >= 0");
  }
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Cyclic coordinate descent from `beta` (updated in place) with residual
// `r = y - X beta` kept in sync. Sweeps the active set to convergence between
// full passes. Returns the number of sweeps used.
struct CdState {
  const Matrix& X;
  Vector col_sq;  // ||x_j||^2 / n
  double inv_n;
};

Index cd_solve(const CdState& st, double lambda, Vector& beta, Vector& r, Index max_sweeps,
               double tol, bool& converged) {
  const Index p = st.X.cols();
  std::vector<Index> active;
  Index sweeps = 0;
  converged = false;

  auto sweep = [&](auto&& indices) {
    double max_change = 0.0;
    for (Index j : indices) {
      if (st.col_sq(j) == 0.0) continue;
      const double old = beta(j);
      const double rho = st.X.col(j).dot(r) * st.inv_n + st.col_sq(j) * old;
      const double updated = soft_threshold(rho, lambda) / st.col_sq(j);
      if (updated != old) {
        r.noalias() -= (updated - old) * st.X.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old) * std::sqrt(st.col_sq(j)));
      }
    }
    return max_change;
  };

  std::vector<Index> all(static_cast<std::size_t>(p));
  std::iota(all.begin(), all.end(), Index{0});
  while (sweeps < max_sweeps) {
    const double full_change = sweep(all);
    ++sweeps;
    active.clear();
    for (Index j = 0; j < p; ++j)
      if (beta(j) != 0.0) active.push_back(j);
    if (full_change < tol) {
      converged = true;
      break;
    }
    while (sweeps < max_sweeps) {
      const double change = sweep(active);
      ++sweeps;
      if (change < tol) break;
    }
  }
  return sweeps;
}

constexpr Index kIrlsPolishEvery = 10;

// Solves the minimax problem on the heaviest 2(p+1) points plus those with
// near-maximal residual, adding violated points and re-solving a few times.
// The restricted optimum h bounds the full one from below, so a restricted
// solution with ||y - X b||_inf <= h is exact.
std::optional<Vector> polish_reference(const Dataset& ds, const Vector& w, const Vector& r) {
  const Index n = ds.n();
  const Index p = ds.p();
  const Index k = std::min(n, 2 * (p + 1));
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](Index i, Index j) { return w(i) > w(j) || (w(i) == w(j) && i < j); });
  const double top = r.cwiseAbs().maxCoeff();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Index j = 0; j < n; ++j) {
    const Index i = idx[static_cast<std::size_t>(j)];
    if (j < k || std::abs(r(i)) >= (1.0 - 1e-3) * top) in[static_cast<std::size_t>(i)] = 1;
  }
  const double tol = 1e-12 * (1.0 + ds.y().cwiseAbs().maxCoeff());
  for (int round = 0; round < 8; ++round) {
    std::vector<Index> rows;
    for (Index i = 0; i < n; ++i)
      if (in[static_cast<std::size_t>(i)]) rows.push_back(i);
    const Index m = static_cast<Index>(rows.size());
    Matrix XA(m, p);
    Vector yA(m);
    for (Index i = 0; i < m; ++i) {
      XA.row(i) = ds.X().row(rows[static_cast<std::size_t>(i)]);
      yA(i) = ds.y()(rows[static_cast<std::size_t>(i)]);
    }
    const LpSolution<double> sol = solve_lp(chebyshev_lp(XA, yA));
    if (sol.status != SolveStatus::Optimal) return std::nullopt;
    Vector beta = sol.x.head(p);
    const double h = (yA - XA * beta).cwiseAbs().maxCoeff();
    const Vector full = (ds.y() - ds.X() * beta).cwiseAbs();
    if (!full.allFinite()) return std::nullopt;
    bool added = false;
    for (Index i = 0; i < n; ++i) {
      if (full(i) > h + tol) {
        in[static_cast<std::size_t>(i)] = 1;
        added = true;
      }
    }
    if (!added) return beta;
  }
  return std::nullopt;
}

}  // namespace

FitResult fit_chebyshev_lp(const Dataset& ds, const LpConfig& config) {
  require_full_column_rank(ds.X());
  const LpSolution<double> sol = solve_lp(chebyshev_lp(ds.X(), ds.y()), config);
  Vector beta = sol.status == SolveStatus::Optimal ? Vector(sol.x.head(ds.p()))
                                                   : Vector(Vector::Zero(ds.p()));
  FitResult out = make_result(ds, std::move(beta), Estimator::ChebyshevLp);
  out.status = sol.status;
  out.iterations = sol.iterations;
  return out;
}

FitResult fit_chebyshev_irls(const Dataset& ds, const IrlsConfig& config) {
  if (config.max_iters < 1 || !(config.weight_floor > 0.0) || !(config.convergence_tol > 0.0)) {
    throw InvalidInputError("irls: configuration values must be positive");
  }
  require_full_column_rank(ds.X());
  const Index n = ds.n();
  Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector beta;
  Vector r;
  double prev = infinity<double>();
  SolveStatus status = SolveStatus::IterationLimit;
  Index iterations = 0;
  for (Index it = 1; it <= config.max_iters; ++it) {
    iterations = it;
    beta = solve_weighted_least_squares(ds.X(), ds.y(), w);
    r = ds.y() - ds.X() * beta;
    const double obj = r.cwiseAbs().maxCoeff();
    const Vector wr = w.cwiseProduct(r.cwiseAbs());
    const double total = wr.sum();
    if (total == 0.0) {
      status = SolveStatus::Optimal;
      break;
    }
    w = (wr / total).cwiseMax(config.weight_floor);
    if (it % kIrlsPolishEvery == 0 || std::abs(obj - prev) < config.convergence_tol) {
      if (auto exact = polish_reference(ds, w, r)) {
        beta = std::move(*exact);
        status = SolveStatus::Optimal;
        break;
      }
    }
    if (std::abs(obj - prev) < config.convergence_tol) {
      status = SolveStatus::Optimal;
      break;
    }
    prev = obj;
  }
  FitResult out = make_result(ds, std::move(beta), Estimator::ChebyshevIrls);
  out.status = status;
  out.iterations = iterations;
  return out;
}

FitResult fit_constrained_ls(const Dataset& ds, double a, const QpConfig& config) {
  const SlabQpResult<double> qp = solve_qp_box_slab(ds.X(), ds.y(), a, config);
  FitResult out = make_result(ds, qp.beta, Estimator::ConstrainedLs);
  out.status = qp.status;
  out.iterations = qp.iterations;
  return out;
}

FitResult fit_chebyshev_lasso(const Dataset& ds, const LassoConfig& config,
                              const LpConfig& lp) {
  const double lambdas[] = {config.lambda};
  return fit_chebyshev_lasso_path(ds, lambdas, lp).front();
}

std::vector<FitResult> fit_chebyshev_lasso_path(const Dataset& ds,
                                                std::span<const double> lambdas,
                                                const LpConfig& lp) {
  for (double l : lambdas) check_lambda(l);
  const Index p = ds.p();
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return lambdas[i] > lambdas[j]; });

  std::vector<FitResult> out(lambdas.size());
  if (lambdas.empty()) return out;
  DenseSimplex<double> simplex(chebyshev_lasso_lp(ds, lambdas[order.front()]), lp);
  for (std::size_t k : order) {
    Vector c = Vector::Constant(2 * p + 1, lambdas[k]);
    c(2 * p) = 1.0;
    simplex.set_objective(c);
    const LpSolution<double> sol = simplex.solve();
    Vector beta = sol.status == SolveStatus::Optimal
                      ? Vector(sol.x.head(p) - sol.x.segment(p, p))
                      : Vector(Vector::Zero(p));
    FitResult fit = make_result(ds, std::move(beta), Estimator::ChebyshevLasso);
    fit.status = sol.status;
    fit.iterations = sol.iterations;
    fit.lambda = lambdas[k];
    out[k] = std::move(fit);
  }
  return out;
}

namespace {

// Active-set refinement of a LASSO iterate. Keeps a Cholesky factor of the
// Gram matrix of the support, solves the stationarity equations with the
// support's signs, steps towards that solution up to the first sign change
// (dropping the coordinate that hits zero) and otherwise adds the largest
// subgradient violators. `beta` is replaced only by a point that satisfies
// the subgradient conditions to `kkt_tol`.
class ActiveSet {
 public:
  ActiveSet(const Matrix& X, Index capacity)
      : X_(X), inv_n_(1.0 / static_cast<double>(X.rows())), L_(capacity, capacity) {}

  Index size() const { return static_cast<Index>(index_.size()); }
  Index index(Index i) const { return index_[static_cast<std::size_t>(i)]; }

  // Factors the Gram matrix of `support` from scratch.
  bool reset(const std::vector<Index>& support) {
    const auto k = static_cast<Index>(support.size());
    if (k > L_.rows()) return false;
    Matrix XS(X_.rows(), k);
    for (Index i = 0; i < k; ++i) XS.col(i) = X_.col(support[static_cast<std::size_t>(i)]);
    Matrix G = Matrix::Zero(k, k);
    G.selfadjointView<Eigen::Lower>().rankUpdate(XS.transpose(), inv_n_);
    const Eigen::LLT<Matrix> llt(G.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success) return false;
    const Matrix Lk = llt.matrixL();
    for (Index i = 0; i < k; ++i) {
      if (!(Lk(i, i) * Lk(i, i) > 1e-10 * G(i, i))) return false;
    }
    L_.topLeftCorner(k, k) = Lk;
    index_ = support;
    return true;
  }

  // Fails when the support would exceed capacity or become (nearly) singular.
  bool add(Index j) {
    const Index k = size();
    if (k == L_.rows()) return false;
    Vector g(k);
    for (Index i = 0; i < k; ++i) g(i) = X_.col(index(i)).dot(X_.col(j)) * inv_n_;
    const double gjj = X_.col(j).squaredNorm() * inv_n_;
    Vector l = g;
    L_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(l);
    const double d = gjj - l.squaredNorm();
    if (!(d > 1e-10 * gjj)) return false;
    L_.row(k).head(k) = l.transpose();
    L_(k, k) = std::sqrt(d);
    index_.push_back(j);
    return true;
  }

  void remove(Index pos) {
    const Index k = size();
    for (Index i = pos; i + 1 < k; ++i) L_.row(i).head(k) = L_.row(i + 1).head(k);
    // Rows pos..k-2 now have one entry right of the diagonal; rotate it away.
    for (Index i = pos; i + 1 < k; ++i) {
      Eigen::JacobiRotation<double> rot;
      rot.makeGivens(L_(i, i), L_(i, i + 1));
      L_.block(i, 0, k - 1 - i, k).applyOnTheRight(i, i + 1, rot);
    }
    index_.erase(index_.begin() + pos);
  }

  Vector solve(const Vector& rhs) const {
    const Index k = size();
    Vector x = rhs;
    const auto T = L_.topLeftCorner(k, k);
    T.triangularView<Eigen::Lower>().solveInPlace(x);
    T.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

 private:
  const Matrix& X_;
  double inv_n_;
  Matrix L_;
  std::vector<Index> index_;
};

bool lasso_support_polish(const Dataset& ds, double lambda, double kkt_tol, Vector& beta) {
  constexpr Index kMaxRounds = 1000;
  constexpr std::size_t kMaxAdd = 16;
  const Matrix& X = ds.X();
  const Index p = beta.size();
  const double inv_n = 1.0 / static_cast<double>(ds.n());
  const Vector c = X.transpose() * ds.y() * inv_n;

  ActiveSet as(X, std::min(ds.n(), p));

  std::vector<double> value, sign;
  // Any sign-consistent start works; an over-full support is cut to its
  // largest scaled entries.
  std::vector<Index> support;
  for (Index j = 0; j < p; ++j)
    if (beta(j) != 0.0) support.push_back(j);
  const Index cap = std::min(ds.n(), p);
  if (static_cast<Index>(support.size()) > cap) {
    const auto keep = static_cast<std::size_t>(cap - cap / 50);
    const auto scaled = [&](Index j) { return std::abs(beta(j)) * X.col(j).norm(); };
    std::nth_element(support.begin(), support.begin() + static_cast<std::ptrdiff_t>(keep) - 1,
                     support.end(), [&](Index a, Index b) { return scaled(a) > scaled(b); });
    support.resize(keep);
    std::sort(support.begin(), support.end());
  }
  for (Index j : support) {
    value.push_back(beta(j));
    sign.push_back(beta(j) > 0.0 ? 1.0 : -1.0);
  }
  if (!as.reset(support)) return false;

  for (Index round = 0; round < kMaxRounds; ++round) {
    const Index k = as.size();
    if (k > 0) {
      Vector rhs(k);
      for (Index i = 0; i < k; ++i) rhs(i) = c(as.index(i)) - lambda * sign[static_cast<std::size_t>(i)];
      const Vector b = as.solve(rhs);
      if (!b.allFinite()) return false;
      double t = 1.0;
      Index drop = -1;
      for (Index i = 0; i < k; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (b(i) * sign[u] <= 0.0) {
          const double ti = value[u] / (value[u] - b(i));
          if (ti < t) {
            t = ti;
            drop = i;
          }
        }
      }
      for (Index i = 0; i < k; ++i) {
        const auto u = static_cast<std::size_t>(i);
        value[u] += t * (b(i) - value[u]);
      }
      if (drop >= 0) {
        as.remove(drop);
        value.erase(value.begin() + drop);
        sign.erase(sign.begin() + drop);
        continue;
      }
    }

    Vector candidate = Vector::Zero(p);
    for (Index i = 0; i < k; ++i) candidate(as.index(i)) = value[static_cast<std::size_t>(i)];
    const Vector g = X.transpose() * (ds.y() - X * candidate) * inv_n;
    std::vector<std::pair<double, Index>> violators;
    for (Index j = 0; j < p; ++j) {
      if (candidate(j) == 0.0 && std::abs(g(j)) - lambda > 0.5 * kkt_tol) {
        violators.emplace_back(std::abs(g(j)) - lambda, j);
      }
    }
    if (violators.empty()) {
      if (lasso_kkt_residual(ds, candidate, lambda) > kkt_tol) return false;
      beta = std::move(candidate);
      return true;
    }
    const std::size_t add = std::min(violators.size(), kMaxAdd);
    std::partial_sort(violators.begin(), violators.begin() + static_cast<std::ptrdiff_t>(add),
                      violators.end(), std::greater<>());
    for (std::size_t i = 0; i < add; ++i) {
      const Index j = violators[i].second;
      if (!as.add(j)) return false;
      value.push_back(0.0);
      sign.push_back(g(j) > 0.0 ? 1.0 : -1.0);
    }
  }
  return false;
}

}  // namespace

FitResult fit_lasso_cd(const Dataset& ds, const LassoConfig& config) {
  check_lambda(config.lambda);
  if (config.max_iters < 1 || !(config.tol > 0.0)) {
    throw InvalidInputError("lasso: max_iters and tol must be positive");
  }
  const double lambdas[] = {config.lambda};
  LassoPathConfig pc;
  pc.max_iters = config.max_iters;
  pc.tol = config.tol;
  pc.early_stop = false;
  return fit_lasso_cd_path(ds, lambdas, pc).front();
}

std::vector<FitResult> fit_lasso_cd_path(const Dataset& ds, std::span<const double> lambdas,
                                         const LassoPathConfig& config) {
  for (double l : lambdas) check_lambda(l);
  const Index n = ds.n();
  const Index p = ds.p();
  CdState st{ds.X(), ds.X().colwise().squaredNorm().transpose() / static_cast<double>(n),
             1.0 / static_cast<double>(n)};
  Vector beta = Vector::Zero(p);
  Vector r = ds.y();
  const double null_dev = ds.y().squaredNorm();
  double prev_ratio = 0.0;
  constexpr double kKktTol = 1e-7;
  constexpr double kLooseTol = 1e-4;

  std::vector<FitResult> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    bool converged = false;
    Index sweeps = 0;
    // Start loose and tighten until the subgradient conditions hold; each
    // round also tries the exact solve on the current support.
    double tol = std::max(config.tol, kLooseTol);
    int rounds = 6;
    for (double t = tol; t > config.tol; t *= 0.01) ++rounds;
    for (int round = 0; round < rounds; ++round) {
      sweeps += cd_solve(st, lambda, beta, r, config.max_iters - sweeps, tol, converged);
      r = ds.y() - ds.X() * beta;
      if (!converged || sweeps >= config.max_iters) break;
      if (lasso_kkt_residual(ds, beta, lambda) <= kKktTol) break;
      if (lasso_support_polish(ds, lambda, kKktTol, beta)) {
        r = ds.y() - ds.X() * beta;
        break;
      }
      tol *= 0.01;
    }
    FitResult fit = make_result(ds, beta, Estimator::LassoCd);
    fit.lambda = lambda;
    fit.iterations = sweeps;
    fit.status = converged && lasso_kkt_residual(ds, beta, lambda) <= kKktTol
                     ? SolveStatus::Optimal
                     : SolveStatus::IterationLimit;
    out.push_back(std::move(fit));

    if (config.early_stop && null_dev > 0.0) {
      const double ratio = 1.0 - r.squaredNorm() / null_dev;
      if (ratio >= config.max_dev_ratio ||
          (out.size() > 1 && ratio - prev_ratio < config.min_dev_change)) {
        break;
      }
      prev_ratio = ratio;
    }
  }
  return out;
}

double lasso_lambda_max(const Dataset& ds) {
  return (ds.X().transpose() * ds.y()).cwiseAbs().maxCoeff() / static_cast<double>(ds.n());
}

std::vector<double> lasso_lambda_grid(const Dataset& ds, Index count, double ratio) {
  if (count < 1 || !(ratio > 0.0) || !(ratio <= 1.0)) {
    throw InvalidInputError("lambda grid: need count >= 1 and 0 < ratio <= 1");
  }
  const double top = lasso_lambda_max(ds);
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double step = std::log(ratio) / static_cast<double>(count - 1);
  for (Index k = 0; k < count; ++k) {
    grid[static_cast<std::size_t>(k)] = top * std::exp(step * static_cast<double>(k));
  }
  return grid;
}

double lasso_objective(const Dataset& ds, const Vector& beta, double lambda) {
  const Vector r = residuals(ds, beta);
  return r.squaredNorm() / (2.0 * static_cast<double>(ds.n())) + lambda * beta.lpNorm<1>();
}

double lasso_kkt_residual(const Dataset& ds, const Vector& beta, double lambda) {
  const Vector r = residuals(ds, beta);
  const Vector g = ds.X().transpose() * r / static_cast<double>(ds.n());
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double v = beta(j) != 0.0 ? std::abs(g(j) - lambda * (beta(j) > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(g(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

FitResult fit_ols(const Dataset& ds) {
  FitResult out = make_result(ds, solve_least_squares(ds.X(), ds.y()), Estimator::Ols);
  out.iterations = 1;
  return out;
}

}  // namespace chebfit
