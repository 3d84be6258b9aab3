#pragma once

#include <chebfit/linalg/types.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace chebfit {

/// minimize objective' x  s.t.  constraint_matrix x <= rhs,  lower <= x <= upper.
///
/// Empty `lower` / `upper` mean "no bound" for every variable; individual
/// entries may be -inf / +inf.
template <typename Scalar>
struct LpProblem {
  VectorX<Scalar> objective;
  MatrixX<Scalar> constraint_matrix;
  VectorX<Scalar> rhs;
  VectorX<Scalar> lower;
  VectorX<Scalar> upper;
};

struct LpConfig {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-10;
  double optimality_tol = 1e-9;
  // 0 selects the default cap of 50 * (m + d) pivots per solve.
  Index max_iterations = 0;
  Index refactor_interval = 100;
  // Consecutive degenerate pivots before pricing falls back to Bland's rule.
  Index degenerate_limit = 50;
};

template <typename Scalar>
struct LpSolution {
  SolveStatus status = SolveStatus::IterationLimit;
  VectorX<Scalar> x;
  Scalar objective_value = Scalar(0);
  Index iterations = 0;
};

/// Bounded-variable primal simplex for inequality-form LPs.
///
/// Every row carries an implicit slack s = rhs - A x >= 0, so a basis is
/// described by the set T of tight rows (nonbasic slacks) and the set S of
/// basic structural columns, with |T| = |S| = k. Only the k x k block
/// M = A(T, S) is inverted; its explicit inverse is updated in O(k^2) per
/// pivot and refactored periodically. This keeps pivots cheap when the
/// optimal vertex has few basic structurals relative to the row count.
///
/// Pricing uses Devex reference weights with a Harris ratio test; after a
/// run of degenerate pivots both switch to Bland's rule until progress
/// resumes. Infeasible starts are repaired by a crash column when one
/// exists, otherwise phase 1 minimizes one auxiliary column (-1 in every
/// row) to zero. The basis survives set_objective(), so a sequence of
/// objectives over the same feasible region warm-starts from the last
/// optimum.
template <typename Scalar>
class DenseSimplex {
 public:
  explicit DenseSimplex(const LpProblem<Scalar>& problem, LpConfig config = {})
      : config_(config) {
    m_ = problem.constraint_matrix.rows();
    d_ = problem.constraint_matrix.cols();
    if (m_ < 1 || d_ < 1) throw DimensionError("lp: need m >= 1 and d >= 1");
    if (problem.objective.size() != d_ || problem.rhs.size() != m_) {
      throw DimensionError("lp: objective/rhs length does not match matrix");
    }
    if ((problem.lower.size() != 0 && problem.lower.size() != d_) ||
        (problem.upper.size() != 0 && problem.upper.size() != d_)) {
      throw DimensionError("lp: bound vectors must be empty or length d");
    }
    if (!all_finite(problem.objective) ||
        !all_finite(problem.constraint_matrix) || !all_finite(problem.rhs)) {
      throw InvalidInputError("lp: non-finite objective, matrix or rhs");
    }
    nc_ = d_ + 1;
    aux_ = d_;
    A_.resize(m_, nc_);
    A_.leftCols(d_) = problem.constraint_matrix;
    A_.col(aux_).setConstant(Scalar(-1));
    b_ = problem.rhs;
    obj_ = VectorX<Scalar>::Zero(nc_);
    obj_.head(d_) = problem.objective;
    lo_ = VectorX<Scalar>::Constant(nc_, -infinity<Scalar>());
    up_ = VectorX<Scalar>::Constant(nc_, infinity<Scalar>());
    if (problem.lower.size() != 0) lo_.head(d_) = problem.lower;
    if (problem.upper.size() != 0) up_.head(d_) = problem.upper;
    for (Index j = 0; j < d_; ++j) {
      if (std::isnan(lo_(j)) || std::isnan(up_(j)) || lo_(j) > up_(j) ||
          lo_(j) == infinity<Scalar>() || up_(j) == -infinity<Scalar>()) {
        throw InvalidInputError("lp: invalid bounds on variable " +
                                std::to_string(j));
      }
    }
    lo_(aux_) = Scalar(0);
    cap_ = std::min(m_, nc_);
    max_iter_ = config_.max_iterations > 0 ? config_.max_iterations
                                           : 50 * (m_ + d_);
  }

  /// Replace the cost vector; the current basis is kept for warm starts.
  void set_objective(const VectorX<Scalar>& c) {
    if (c.size() != d_) throw DimensionError("lp: objective length mismatch");
    if (!all_finite(c)) throw InvalidInputError("lp: non-finite objective");
    obj_.head(d_) = c;
  }

  LpSolution<Scalar> solve() {
    const Index start = iterations_;
    LpSolution<Scalar> out;
    if (phase_ == Phase::Fresh) {
      initialize();
      const SolveStatus st = run_phase_one();
      if (st != SolveStatus::Optimal) {
        out.status = st;
        return finish(out, start);
      }
    }
    if (phase_ == Phase::Infeasible) {
      out.status = SolveStatus::Infeasible;
      return finish(out, start);
    }
    out.status = iterate(obj_, start);
    return finish(out, start);
  }

  Index basis_size() const noexcept { return k_; }
  Index rows() const noexcept { return m_; }
  Index cols() const noexcept { return d_; }

 private:
  enum class Phase { Fresh, Ready, Infeasible };
  enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero };
  using RowMatrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  struct Entering {
    Index index = -1;  // column, or row when `slack`
    bool slack = false;
    int sign = 1;
  };

  enum class LeaveKind { None, Flip, Structural, Slack };
  struct Leaving {
    LeaveKind kind = LeaveKind::None;
    Index index = -1;  // position in S, or row
    bool to_upper = false;
    Scalar step = Scalar(0);
  };

  LpSolution<Scalar>& finish(LpSolution<Scalar>& out, Index start) {
    out.iterations = iterations_ - start;
    out.x = x_.head(d_);
    out.objective_value = obj_.head(d_).dot(out.x);
    return out;
  }

  bool is_fixed(Index j) const { return lo_(j) == up_(j); }

  void initialize() {
    x_ = VectorX<Scalar>::Zero(nc_);
    state_.assign(static_cast<std::size_t>(nc_), VarState::FreeZero);
    for (Index j = 0; j < nc_; ++j) {
      if (std::isfinite(lo_(j))) {
        state_[j] = VarState::AtLower;
        x_(j) = lo_(j);
      } else if (std::isfinite(up_(j))) {
        state_[j] = VarState::AtUpper;
        x_(j) = up_(j);
      }
    }
    s_ = b_ - A_ * x_;
    rowpos_.assign(static_cast<std::size_t>(m_), -1);
    colpos_.assign(static_cast<std::size_t>(nc_), -1);
    T_.clear();
    S_.clear();
    T_.reserve(static_cast<std::size_t>(cap_));
    S_.reserve(static_cast<std::size_t>(cap_));
    k_ = 0;
    W_.resize(cap_, cap_);
    AT_.resize(cap_, nc_);
    AS_.resize(m_, cap_);
    z_.resize(cap_);
    dS_.resize(cap_);
    pi_.resize(cap_);
    cS_.resize(cap_);
    rT_.resize(cap_);
    w_.resize(m_);
    ds_.resize(m_);
    red_.resize(nc_);
    alpha_.resize(nc_);
    ref_col_ = VectorX<Scalar>::Ones(nc_);
    ref_row_ = VectorX<Scalar>::Ones(m_);
  }

  SolveStatus run_phase_one() {
    Index r = 0;
    const Scalar worst = s_.minCoeff(&r);
    if (worst >= -Scalar(config_.feas_tol)) {
      fix_auxiliary();
      phase_ = Phase::Ready;
      return SolveStatus::Optimal;
    }
    // Crash: a column that is nonpositive in every row and unbounded above
    // restores feasibility on its own (the radius column of a minimax LP).
    const Index crash = crash_column();
    if (crash >= 0) {
      Scalar t = Scalar(0);
      for (Index i = 0; i < m_; ++i) {
        if (s_(i) < Scalar(0)) {
          const Scalar ti = -s_(i) / -A_(i, crash);
          if (ti > t) {
            t = ti;
            r = i;
          }
        }
      }
      x_(crash) += t;
      s_.noalias() -= t * A_.col(crash);
      grow(r, crash);
      s_(r) = Scalar(0);
      fix_auxiliary();
      phase_ = Phase::Ready;
      return SolveStatus::Optimal;
    }

    x_(aux_) = -worst;
    s_.array() += x_(aux_);
    grow(r, aux_);
    s_(r) = Scalar(0);

    VectorX<Scalar> cost = VectorX<Scalar>::Zero(nc_);
    cost(aux_) = Scalar(1);
    const SolveStatus st = iterate(cost, iterations_);
    if (st == SolveStatus::IterationLimit) return st;
    if (x_(aux_) > Scalar(config_.feas_tol)) {
      phase_ = Phase::Infeasible;
      return SolveStatus::Infeasible;
    }
    fix_auxiliary();
    phase_ = Phase::Ready;
    return SolveStatus::Optimal;
  }

  // Cheapest column j < d with a finite lower bound, no upper bound, A(:,j) <= 0
  // and A(i,j) < 0 on every violated row; -1 when none exists.
  Index crash_column() const {
    Index best = -1;
    for (Index j = 0; j < d_; ++j) {
      if (!std::isfinite(lo_(j)) || std::isfinite(up_(j))) continue;
      bool ok = true;
      for (Index i = 0; i < m_ && ok; ++i) {
        const Scalar a = A_(i, j);
        if (a > Scalar(0) || (s_(i) < Scalar(0) && a > -Scalar(config_.pivot_tol)))
          ok = false;
      }
      if (ok && (best < 0 || obj_(j) < obj_(best))) best = j;
    }
    return best;
  }

  void fix_auxiliary() {
    up_(aux_) = Scalar(0);
    if (state_[aux_] != VarState::Basic) {
      state_[aux_] = VarState::AtLower;
      x_(aux_) = Scalar(0);
    }
  }

  SolveStatus iterate(const VectorX<Scalar>& cost, Index start) {
    const Scalar dtol =
        Scalar(config_.optimality_tol) *
        std::max(Scalar(1), cost.cwiseAbs().maxCoeff());
    Index degenerate_run = 0;
    Index since_refactor = 0;
    bool verified = false;
    for (;;) {
      if (iterations_ - start >= max_iter_) return SolveStatus::IterationLimit;
      const bool bland = degenerate_run >= config_.degenerate_limit;
      const Entering e = price(cost, dtol, bland);
      if (e.index < 0) {
        // Confirm optimality on freshly factored values before returning.
        if (verified || since_refactor == 0) return SolveStatus::Optimal;
        refactor();
        since_refactor = 0;
        verified = true;
        continue;
      }
      verified = false;
      direction(e);
      const Leaving l = ratio_test(e, bland);
      if (l.kind == LeaveKind::None) return SolveStatus::Unbounded;
      if (l.kind != LeaveKind::Flip) update_reference_weights(e, l);
      pivot(e, l);
      ++iterations_;
      degenerate_run = l.step <= Scalar(1e-12) ? degenerate_run + 1 : 0;
      if (l.kind != LeaveKind::Flip &&
          ++since_refactor >= std::max(config_.refactor_interval, k_)) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  Entering price(const VectorX<Scalar>& cost, Scalar dtol, bool bland) {
    auto W = W_.topLeftCorner(k_, k_);
    for (Index i = 0; i < k_; ++i) cS_(i) = cost(S_[i]);
    pi_.head(k_).noalias() = W.transpose() * cS_.head(k_);
    red_ = cost;
    red_.noalias() -= AT_.topRows(k_).transpose() * pi_.head(k_);

    Entering best;
    Scalar best_score = Scalar(0);
    for (Index j = 0; j < nc_; ++j) {
      const VarState st = state_[j];
      if (st == VarState::Basic || is_fixed(j)) continue;
      const Scalar dj = red_(j);
      int sign = 0;
      if (st == VarState::AtLower && dj < -dtol) sign = 1;
      else if (st == VarState::AtUpper && dj > dtol) sign = -1;
      else if (st == VarState::FreeZero && std::abs(dj) > dtol)
        sign = dj < 0 ? 1 : -1;
      if (sign == 0) continue;
      if (bland) return Entering{j, false, sign};
      const Scalar score = dj * dj / ref_col_(j);
      if (score > best_score) {
        best_score = score;
        best = Entering{j, false, sign};
      }
    }
    // Slack of tight row T[i] has reduced cost -pi(i); it may only increase.
    Index bland_row = -1;
    Index bland_pos = -1;
    for (Index i = 0; i < k_; ++i) {
      const Scalar dj = -pi_(i);
      if (dj >= -dtol) continue;
      if (bland) {
        if (bland_row < 0 || T_[i] < bland_row) {
          bland_row = T_[i];
          bland_pos = i;
        }
      } else if (dj * dj / ref_row_(T_[i]) > best_score) {
        best_score = dj * dj / ref_row_(T_[i]);
        best = Entering{T_[i], true, 1};
      }
    }
    if (bland && bland_pos >= 0) return Entering{bland_row, true, 1};
    return best;
  }

  // Fills dS_ (change of basic structurals per unit step) and ds_ (change of
  // every slack per unit step; meaningful on non-tight rows).
  void direction(const Entering& e) {
    auto W = W_.topLeftCorner(k_, k_);
    if (!e.slack) {
      rT_.head(k_) = AT_.col(e.index).head(k_);
      z_.head(k_).noalias() = W * rT_.head(k_);
    } else {
      z_.head(k_) = W.col(rowpos_[e.index]);
    }
    w_.noalias() = AS_.leftCols(k_) * z_.head(k_);
    const Scalar sg = Scalar(e.sign);
    if (!e.slack) {
      dS_.head(k_) = -sg * z_.head(k_);
      ds_ = -sg * (A_.col(e.index) - w_);
    } else {
      dS_.head(k_) = -z_.head(k_);
      ds_ = w_;
    }
  }

  Leaving ratio_test(const Entering& e, bool bland) {
    const Scalar ptol = Scalar(config_.pivot_tol);
    const Scalar ftol = Scalar(config_.feas_tol);

    // Distance to the blocking bound and |rate| for a candidate; returns
    // false when the candidate does not block.
    auto structural = [&](Index i, Scalar& dist, Scalar& rate, bool& upper) {
      const Index j = S_[i];
      const Scalar dlt = dS_(i);
      if (dlt < -ptol && std::isfinite(lo_(j))) {
        dist = x_(j) - lo_(j);
        rate = -dlt;
        upper = false;
        return true;
      }
      if (dlt > ptol && std::isfinite(up_(j))) {
        dist = up_(j) - x_(j);
        rate = dlt;
        upper = true;
        return true;
      }
      return false;
    };
    auto slack = [&](Index r, Scalar& dist, Scalar& rate) {
      if (rowpos_[r] >= 0) return false;
      if (ds_(r) < -ptol) {
        dist = s_(r);
        rate = -ds_(r);
        return true;
      }
      return false;
    };

    Leaving best;
    Scalar range = infinity<Scalar>();
    if (!e.slack && std::isfinite(lo_(e.index)) && std::isfinite(up_(e.index))) {
      range = up_(e.index) - lo_(e.index);
    }

    if (bland) {
      // Exact minimum ratio; ties go to the smallest variable index.
      Scalar theta = infinity<Scalar>();
      Index key = -1;
      auto consider = [&](Scalar t, Index k2, const Leaving& cand) {
        t = std::max(t, Scalar(0));
        const Scalar tie = Scalar(1e-12) * (Scalar(1) + std::abs(theta));
        if (t < theta - tie || (std::abs(t - theta) <= tie && k2 < key)) {
          theta = t;
          key = k2;
          best = cand;
        }
      };
      for (Index i = 0; i < k_; ++i) {
        Scalar dist, rate;
        bool upper;
        if (structural(i, dist, rate, upper)) {
          consider(dist / rate, S_[i],
                   Leaving{LeaveKind::Structural, i, upper, Scalar(0)});
        }
      }
      for (Index r = 0; r < m_; ++r) {
        Scalar dist, rate;
        if (slack(r, dist, rate)) {
          consider(dist / rate, nc_ + r,
                   Leaving{LeaveKind::Slack, r, false, Scalar(0)});
        }
      }
      if (range <= theta) {
        best = Leaving{LeaveKind::Flip, e.index, e.sign > 0, range};
        return best;
      }
      best.step = theta;
      return best;
    }

    // Harris two-pass: bound the step with relaxed bounds, then take the
    // largest pivot among candidates reaching their bound before that.
    Scalar relaxed = infinity<Scalar>();
    for (Index i = 0; i < k_; ++i) {
      Scalar dist, rate;
      bool upper;
      if (structural(i, dist, rate, upper)) {
        relaxed = std::min(relaxed, (std::max(dist, Scalar(0)) + ftol) / rate);
      }
    }
    for (Index r = 0; r < m_; ++r) {
      Scalar dist, rate;
      if (slack(r, dist, rate)) {
        relaxed = std::min(relaxed, (std::max(dist, Scalar(0)) + ftol) / rate);
      }
    }
    if (range <= relaxed && std::isfinite(range)) {
      return Leaving{LeaveKind::Flip, e.index, e.sign > 0, range};
    }
    if (!std::isfinite(relaxed)) return best;

    Scalar best_rate = Scalar(0);
    for (Index i = 0; i < k_; ++i) {
      Scalar dist, rate;
      bool upper;
      if (structural(i, dist, rate, upper) &&
          std::max(dist, Scalar(0)) / rate <= relaxed && rate > best_rate) {
        best_rate = rate;
        best = Leaving{LeaveKind::Structural, i, upper,
                       std::max(dist, Scalar(0)) / rate};
      }
    }
    for (Index r = 0; r < m_; ++r) {
      Scalar dist, rate;
      if (slack(r, dist, rate) && std::max(dist, Scalar(0)) / rate <= relaxed &&
          rate > best_rate) {
        best_rate = rate;
        best = Leaving{LeaveKind::Slack, r, false,
                       std::max(dist, Scalar(0)) / rate};
      }
    }
    return best;
  }

  void pivot(const Entering& e, const Leaving& l) {
    const Scalar theta = l.step;
    if (theta != Scalar(0)) {
      if (!e.slack) x_(e.index) += Scalar(e.sign) * theta;
      for (Index i = 0; i < k_; ++i) x_(S_[i]) += theta * dS_(i);
      s_.noalias() += theta * ds_;
    }
    for (Index i = 0; i < k_; ++i) s_(T_[i]) = Scalar(0);
    if (e.slack) s_(e.index) = theta;

    if (l.kind == LeaveKind::Flip) {
      state_[e.index] = l.to_upper ? VarState::AtUpper : VarState::AtLower;
      x_(e.index) = l.to_upper ? up_(e.index) : lo_(e.index);
      return;
    }

    if (l.kind == LeaveKind::Structural) {
      const Index j = S_[l.index];
      state_[j] = l.to_upper ? VarState::AtUpper : VarState::AtLower;
      x_(j) = l.to_upper ? up_(j) : lo_(j);
      if (!e.slack) {
        replace_column(l.index, e.index);
      } else {
        shrink(rowpos_[e.index], l.index);
      }
    } else {
      s_(l.index) = Scalar(0);
      if (!e.slack) {
        grow(l.index, e.index);
      } else {
        replace_row(rowpos_[e.index], l.index);
      }
    }
    if (!e.slack) state_[e.index] = VarState::Basic;
  }

  // Devex reference weights. alpha_ holds the pivot row over structural
  // columns and rho_ over the slacks of tight rows (indexed by position).
  void update_reference_weights(const Entering& e, const Leaving& l) {
    auto W = W_.topLeftCorner(k_, k_);
    if (l.kind == LeaveKind::Structural) {
      rho_ = W.row(l.index).transpose();
      alpha_.noalias() = AT_.topRows(k_).transpose() * rho_;
    } else {
      const VectorX<Scalar> v = AS_.row(l.index).head(k_).transpose();
      rho_.noalias() = W.transpose() * v;
      alpha_ = A_.row(l.index).transpose();
      alpha_.noalias() -= AT_.topRows(k_).transpose() * rho_;
    }
    const Scalar aq = e.slack ? rho_(rowpos_[e.index]) : alpha_(e.index);
    if (std::abs(aq) <= Scalar(config_.pivot_tol)) return;
    const Scalar wq = e.slack ? ref_row_(e.index) : ref_col_(e.index);
    const Scalar ratio = wq / (aq * aq);
    for (Index j = 0; j < nc_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      ref_col_(j) = std::max(ref_col_(j), alpha_(j) * alpha_(j) * ratio);
    }
    for (Index i = 0; i < k_; ++i) {
      const Index r = T_[i];
      ref_row_(r) = std::max(ref_row_(r), rho_(i) * rho_(i) * ratio);
    }
    const Scalar leave = std::max(ratio, Scalar(1));
    if (l.kind == LeaveKind::Structural) {
      ref_col_(S_[l.index]) = leave;
    } else {
      ref_row_(l.index) = leave;
    }
  }

  // Row r becomes tight and column q basic: border M with a new row/column.
  void grow(Index r, Index q) {
    const Index k = k_;
    auto W = W_.topLeftCorner(k, k);
    VectorX<Scalar> u(k), v(k);
    u = AT_.col(q).head(k);
    v = AS_.row(r).head(k).transpose();
    const VectorX<Scalar> Wu = W * u;
    const VectorX<Scalar> vW = W.transpose() * v;
    const Scalar schur = A_(r, q) - v.dot(Wu);
    W.noalias() += (Wu / schur) * vW.transpose();
    W_.block(0, k, k, 1) = -Wu / schur;
    W_.block(k, 0, 1, k) = -vW.transpose() / schur;
    W_(k, k) = Scalar(1) / schur;
    AT_.row(k) = A_.row(r);
    AS_.col(k) = A_.col(q);
    T_.push_back(r);
    S_.push_back(q);
    rowpos_[r] = k;
    colpos_[q] = k;
    state_[q] = VarState::Basic;
    k_ = k + 1;
  }

  // Basic column at position l is replaced by column q.
  void replace_column(Index l, Index q) {
    auto W = W_.topLeftCorner(k_, k_);
    const Scalar piv = z_(l);
    const VectorX<Scalar> row = W.row(l) / piv;
    for (Index i = 0; i < k_; ++i) {
      if (i != l) W.row(i).noalias() -= z_(i) * row.transpose();
    }
    W.row(l) = row.transpose();
    AS_.col(l) = A_.col(q);
    colpos_[S_[l]] = -1;
    S_[l] = q;
    colpos_[q] = l;
  }

  // Tight row at position pt is replaced by row r.
  void replace_row(Index pt, Index r) {
    auto W = W_.topLeftCorner(k_, k_);
    VectorX<Scalar> v(k_);
    v = AS_.row(r).head(k_).transpose();
    const VectorX<Scalar> g = W.transpose() * v;
    const Scalar piv = g(pt);
    const VectorX<Scalar> col = W.col(pt) / piv;
    for (Index j = 0; j < k_; ++j) {
      if (j != pt) W.col(j).noalias() -= g(j) * col;
    }
    W.col(pt) = col;
    AT_.row(pt) = A_.row(r);
    rowpos_[T_[pt]] = -1;
    T_[pt] = r;
    rowpos_[r] = pt;
  }

  // Tight row at position pt leaves T and basic column at position l leaves S.
  void shrink(Index pt, Index l) {
    const Index last = k_ - 1;
    if (pt != last) {
      W_.col(pt).head(k_).swap(W_.col(last).head(k_));
      AT_.row(pt).swap(AT_.row(last));
      std::swap(T_[pt], T_[last]);
      rowpos_[T_[pt]] = pt;
    }
    if (l != last) {
      W_.row(l).head(k_).swap(W_.row(last).head(k_));
      AS_.col(l).swap(AS_.col(last));
      std::swap(S_[l], S_[last]);
      colpos_[S_[l]] = l;
    }
    const Scalar corner = W_(last, last);
    const VectorX<Scalar> colv = W_.col(last).head(last);
    const VectorX<Scalar> rowv = W_.row(last).head(last).transpose();
    W_.topLeftCorner(last, last).noalias() -= (colv / corner) * rowv.transpose();
    rowpos_[T_[last]] = -1;
    colpos_[S_[last]] = -1;
    T_.pop_back();
    S_.pop_back();
    k_ = last;
  }

  // Rebuild the inverse from scratch and recompute all basic values.
  void refactor() {
    if (k_ > 0) {
      MatrixX<Scalar> M(k_, k_);
      for (Index i = 0; i < k_; ++i)
        for (Index j = 0; j < k_; ++j) M(i, j) = AT_(i, S_[j]);
      W_.topLeftCorner(k_, k_) = Eigen::PartialPivLU<MatrixX<Scalar>>(M).inverse();
      VectorX<Scalar> xn = x_;
      for (Index i = 0; i < k_; ++i) xn(S_[i]) = Scalar(0);
      VectorX<Scalar> rhs(k_);
      for (Index i = 0; i < k_; ++i) rhs(i) = b_(T_[i]) - AT_.row(i).dot(xn);
      const VectorX<Scalar> xs = W_.topLeftCorner(k_, k_) * rhs;
      for (Index i = 0; i < k_; ++i) x_(S_[i]) = xs(i);
    }
    s_.noalias() = b_ - A_ * x_;
    for (Index i = 0; i < k_; ++i) s_(T_[i]) = Scalar(0);
  }

  LpConfig config_;
  Index m_ = 0, d_ = 0, nc_ = 0, aux_ = 0, cap_ = 0, max_iter_ = 0;
  MatrixX<Scalar> A_;
  // Copies of A(T, :) and A(:, S) in basis order.
  RowMatrix AT_;
  MatrixX<Scalar> AS_;
  VectorX<Scalar> b_, obj_, lo_, up_;

  Phase phase_ = Phase::Fresh;
  Index iterations_ = 0;
  VectorX<Scalar> x_, s_;
  std::vector<VarState> state_;
  std::vector<Index> rowpos_, colpos_, T_, S_;
  Index k_ = 0;
  MatrixX<Scalar> W_;
  VectorX<Scalar> z_, dS_, pi_, cS_, rT_, w_, ds_, red_;
  VectorX<Scalar> alpha_, rho_, ref_col_, ref_row_;
};

/// One-shot LP solve.
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LpProblem<Scalar>& problem,
                            const LpConfig& config = {}) {
  DenseSimplex<Scalar> simplex(problem, config);
  return simplex.solve();
}

}  // namespace chebfit
