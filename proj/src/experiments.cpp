#include <chebfit/estimators.hpp>
#include <chebfit/experiments.hpp>
#include <chebfit/geometry.hpp>
#include <chebfit/parallel.hpp>
#include <chebfit/random.hpp>
#include <chebfit/theory.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace chebfit {

namespace {

struct Cell {
  Index n = 0;
  Index p = 0;
  Index s = 0;
};

struct TaskOut {
  std::vector<ExperimentRecord> records;
  std::string failure;  // empty on success
  bool skipped = false;
  double min_slack = infinity<double>();
  double max_excess = -infinity<double>();
};

using Clock = std::chrono::steady_clock;

std::uint64_t task_seed(const ExperimentConfig& cfg, const Cell& c, Index rep) {
  return rng::derive_seed(cfg.seed, {rng::fnv1a(to_string(cfg.experiment)),
                                     static_cast<std::uint64_t>(c.n),
                                     static_cast<std::uint64_t>(c.p),
                                     static_cast<std::uint64_t>(c.s),
                                     static_cast<std::uint64_t>(rep)});
}

ExperimentRecord make_record(const Cell& c, Index rep, const FitResult& fit, const Truth& truth,
                             double ms) {
  ExperimentRecord r;
  r.n = c.n;
  r.p = c.p;
  r.s = c.s;
  r.rep = rep;
  r.estimator = tag(fit.estimator);
  const Vector d = fit.beta_hat - truth.beta_star;
  r.l2_error = d.norm();
  r.l1_error = d.lpNorm<1>();
  r.a_hat = fit.a_hat;
  r.lambda_used = fit.lambda;
  r.wall_ms = ms;
  return r;
}

void note_critical(TaskOut& out, const Dataset& ds, const FitResult& fit) {
  out.min_slack = std::min(out.min_slack, critical_report(ds, fit.beta_hat).min_slack());
  out.max_excess = std::max(out.max_excess, fit.a_hat - ds.truth()->a);
}

// Runs body(cell, rep, out) for every (cell, rep) and folds the results in
// task order. A cell with any failed task contributes no records.
template <typename Body>
RunResult run_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells, int jobs,
                    Body&& body) {
  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  std::vector<TaskOut> outs(cells.size() * reps);
  std::unique_ptr<std::atomic<long long>[]> spent(new std::atomic<long long>[cells.size()]);
  for (std::size_t c = 0; c < cells.size(); ++c) spent[c] = 0;

  parallel_for(outs.size(), jobs, [&](std::size_t t) {
    const std::size_t c = t / reps;
    TaskOut& out = outs[t];
    if (cfg.cell_budget_ms > 0.0 && static_cast<double>(spent[c].load()) > cfg.cell_budget_ms) {
      out.skipped = true;
      return;
    }
    const auto start = Clock::now();
    try {
      body(cells[c], static_cast<Index>(t % reps), out);
    } catch (const Error& e) {
      out.failure = e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    spent[c] += ms.count();
  });

  RunResult res;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::string status = "ok";
    for (std::size_t r = 0; r < reps; ++r) {
      const TaskOut& o = outs[c * reps + r];
      if (!o.failure.empty()) {
        status = "failed: " + o.failure;
        break;
      }
      if (o.skipped) status = "budget exceeded";
    }
    if (status != "ok") {
      ++res.failed_cells;
      std::cerr << "cell n=" << cells[c].n << " p=" << cells[c].p << " s=" << cells[c].s
                << " aborted (" << status << ")\n";
      CellSummary failed;
      failed.n = cells[c].n;
      failed.p = cells[c].p;
      failed.s = cells[c].s;
      failed.status = status;
      res.cells.push_back(failed);
      continue;
    }
    for (std::size_t r = 0; r < reps; ++r) {
      const TaskOut& o = outs[c * reps + r];
      res.records.insert(res.records.end(), o.records.begin(), o.records.end());
      res.min_critical_slack = std::min(res.min_critical_slack, o.min_slack);
      res.max_a_hat_excess = std::max(res.max_a_hat_excess, o.max_excess);
    }
  }
  return res;
}

// Mean and standard error per (n, p, s, estimator), in first-seen order.
std::vector<CellSummary> summarize(const std::vector<ExperimentRecord>& records) {
  std::vector<CellSummary> out;
  std::map<std::tuple<Index, Index, Index, std::string>, std::size_t> where;
  std::vector<std::array<double, 4>> sums;  // l2, l2^2, l1, l1^2
  for (const auto& r : records) {
    const auto key = std::tuple{r.n, r.p, r.s, r.estimator};
    auto [it, fresh] = where.try_emplace(key, out.size());
    if (fresh) {
      CellSummary c;
      c.n = r.n;
      c.p = r.p;
      c.s = r.s;
      c.estimator = r.estimator;
      out.push_back(c);
      sums.push_back({0, 0, 0, 0});
    }
    auto& s = sums[it->second];
    s[0] += r.l2_error;
    s[1] += r.l2_error * r.l2_error;
    s[2] += r.l1_error;
    s[3] += r.l1_error * r.l1_error;
    ++out[it->second].count;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double k = static_cast<double>(out[i].count);
    const auto& s = sums[i];
    out[i].mean_l2 = s[0] / k;
    out[i].mean_l1 = s[2] / k;
    if (out[i].count > 1) {
      out[i].se_l2 = std::sqrt(std::max(0.0, (s[1] - k * out[i].mean_l2 * out[i].mean_l2) / (k - 1)) / k);
      out[i].se_l1 = std::sqrt(std::max(0.0, (s[3] - k * out[i].mean_l1 * out[i].mean_l1) / (k - 1)) / k);
    }
  }
  return out;
}

void merge_failed(RunResult& res, std::vector<CellSummary> ok) {
  for (auto& c : res.cells) ok.push_back(std::move(c));
  res.cells = std::move(ok);
}

double wall(const ExperimentConfig& cfg, Clock::time_point start) {
  if (!cfg.record_timing) return 0.0;
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInputError("fit_line needs >= 2 points");
  const double k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidInputError("fit_line needs two distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

RunResult run_rate_curve(const ExperimentConfig& cfg, int jobs) {
  std::vector<Cell> cells;
  for (Index n : cfg.n_grid)
    for (Index p : cfg.p_grid) cells.push_back({n, p, 0});
  RunResult res = run_cells(cfg, cells, jobs, [&](const Cell& c, Index rep, TaskOut& out) {
    const auto start = Clock::now();
    const Dataset ds = make_dataset(design_for(cfg, c.p), HalfOnes{}, UniformNoise{cfg.a}, c.n,
                                    task_seed(cfg, c, rep));
    const FitResult fit = fit_chebyshev_lp(ds);
    if (fit.status != SolveStatus::Optimal) throw Error(std::string("lp ") + to_string(fit.status));
    note_critical(out, ds, fit);
    out.records.push_back(make_record(c, rep, fit, *ds.truth(), wall(cfg, start)));
  });
  const bool sphere = cfg.design_family == "sphere";
  res.x_axis = sphere ? "p*sqrt(p)/n" : "p/n";
  std::vector<CellSummary> ok = summarize(res.records);
  std::vector<double> xs, ys;
  for (auto& c : ok) {
    const double p = static_cast<double>(c.p);
    c.x = (sphere ? p * std::sqrt(p) : p) / static_cast<double>(c.n);
    xs.push_back(c.x);
    ys.push_back(c.mean_l2);
  }
  if (xs.size() >= 2) res.fits.emplace_back(tag(Estimator::ChebyshevLp), fit_line(xs, ys));
  merge_failed(res, std::move(ok));
  return res;
}

RunResult run_ols_vs_cheb(const ExperimentConfig& cfg, int jobs) {
  std::vector<Cell> cells;
  for (Index n : cfg.n_grid) cells.push_back({n, cfg.p_grid.front(), 0});
  RunResult res = run_cells(cfg, cells, jobs, [&](const Cell& c, Index rep, TaskOut& out) {
    const Dataset ds = make_dataset(design_for(cfg, c.p), HalfOnes{}, UniformNoise{cfg.a}, c.n,
                                    task_seed(cfg, c, rep));
    auto start = Clock::now();
    const FitResult cheb = fit_chebyshev_lp(ds);
    if (cheb.status != SolveStatus::Optimal) throw Error(std::string("lp ") + to_string(cheb.status));
    note_critical(out, ds, cheb);
    out.records.push_back(make_record(c, rep, cheb, *ds.truth(), wall(cfg, start)));
    start = Clock::now();
    const FitResult ols = fit_ols(ds);
    out.records.push_back(make_record(c, rep, ols, *ds.truth(), wall(cfg, start)));
  });
  res.x_axis = "n";
  std::vector<CellSummary> ok = summarize(res.records);
  for (const char* est : {tag(Estimator::ChebyshevLp), tag(Estimator::Ols)}) {
    std::vector<double> xs, ys;
    for (auto& c : ok) {
      if (c.estimator != est) continue;
      c.x = static_cast<double>(c.n);
      xs.push_back(std::log(static_cast<double>(c.n)));
      ys.push_back(std::log(c.mean_l2));
    }
    if (xs.size() >= 2) res.fits.emplace_back(est, fit_line(xs, ys));
  }
  merge_failed(res, std::move(ok));
  return res;
}

RunResult run_lasso_compare(const ExperimentConfig& cfg, int jobs) {
  std::vector<Cell> cells;
  for (Index n : cfg.n_grid)
    for (Index s : cfg.s_grid) cells.push_back({n, cfg.p_offset + s, s});
  RunResult res = run_cells(cfg, cells, jobs, [&](const Cell& c, Index rep, TaskOut& out) {
    const Dataset ds = make_dataset(design_for(cfg, c.p), SparseSigned{c.s}, UniformNoise{cfg.a},
                                    c.n, task_seed(cfg, c, rep));
    const Truth& truth = *ds.truth();
    // Oracle tuning: keep the fit closest to beta* in l1.
    const auto pick = [&](const std::vector<FitResult>& path, const char* what) {
      const FitResult* best = nullptr;
      double best_err = infinity<double>();
      for (const auto& f : path) {
        if (f.status != SolveStatus::Optimal) continue;
        const double e = (f.beta_hat - truth.beta_star).lpNorm<1>();
        if (e < best_err) {
          best_err = e;
          best = &f;
        }
      }
      if (!best) throw Error(std::string(what) + ": no penalty level solved to optimality");
      return *best;
    };
    auto start = Clock::now();
    const std::vector<double> cheb_grid = chebyshev_lasso_grid(cfg.lambda_grid, c.n, c.p);
    const FitResult cheb = pick(fit_chebyshev_lasso_path(ds, cheb_grid), "cheb-lasso");
    out.records.push_back(make_record(c, rep, cheb, truth, wall(cfg, start)));
    start = Clock::now();
    const std::vector<double> grid = lasso_lambda_grid(ds, cfg.lasso_count, cfg.lasso_ratio);
    const FitResult lasso = pick(fit_lasso_cd_path(ds, grid), "lasso");
    out.records.push_back(make_record(c, rep, lasso, truth, wall(cfg, start)));
  });
  merge_failed(res, summarize(res.records));
  return res;
}

std::vector<ContainmentRow> run_containment(const ExperimentConfig& cfg, int jobs) {
  std::vector<ContainmentRow> rows;
  for (Index p : cfg.p_grid) {
    const DesignSpec design = design_for(cfg, p);
    for (Index m : cfg.m_grid) {
      ContainmentRow row;
      row.design = family_name(design);
      row.p = p;
      row.m = m;
      // Bound parameters from the family's worked example; xi above the
      // family's radius gets the trivial bound 1.
      double xi_family = 0.0;
      double bound = 1.0;
      if (std::holds_alternative<OrthonormalDesign>(design)) {
        xi_family = 1.0;
      } else if (!std::holds_alternative<CauchyDesign>(design)) {
        const BoundReport rep = example_bound(design, 1, cfg.gamma, cfg.L, cfg.a);
        xi_family = rep.component("xi");
      }
      row.xi = cfg.xi.value_or(xi_family);
      if (row.xi <= 0.0) throw ConfigError("containment: set containment.xi for " + row.design);
      if (row.xi <= xi_family) {
        if (std::holds_alternative<OrthonormalDesign>(design)) {
          // Union bound over the 2p signed axes.
          const double q = 1.0 - 1.0 / (2.0 * static_cast<double>(p));
          bound = std::min(1.0, 2.0 * static_cast<double>(p) * std::pow(q, static_cast<double>(m)));
        } else {
          const BoundReport rep = example_bound(design, 1, cfg.gamma, cfg.L, cfg.a);
          bound = containment_prob_bound(row.xi, rep.component("rho"), rep.component("upsilon"), p, m);
        }
      }
      row.bound = bound;
      const auto est = estimate_containment_probability(
          design, m, row.xi, cfg.reps,
          rng::derive_seed(cfg.seed, {rng::fnv1a("containment"), static_cast<std::uint64_t>(p),
                                      static_cast<std::uint64_t>(m)}),
          cfg.directions, jobs);
      row.failure = est.value;
      row.std_error = est.std_error;
      row.exact = est.exact;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<BoundCheckRow> run_bound_check(const ExperimentConfig& cfg, int jobs) {
  const Index p = cfg.p_grid.front();
  const DesignSpec design = design_for(cfg, p);
  std::vector<BoundCheckRow> rows;
  for (Index n : cfg.n_grid) {
    const BoundReport rep = example_bound(design, n, cfg.gamma, cfg.L, cfg.a);
    std::vector<double> err(static_cast<std::size_t>(cfg.reps));
    const Cell cell{n, p, 0};
    parallel_for(err.size(), jobs, [&](std::size_t r) {
      const Dataset ds = make_dataset(design, HalfOnes{}, UniformNoise{cfg.a}, n,
                                      task_seed(cfg, cell, static_cast<Index>(r)));
      const FitResult fit = fit_chebyshev_lp(ds);
      if (fit.status != SolveStatus::Optimal) throw Error(std::string("lp ") + to_string(fit.status));
      err[r] = (fit.beta_hat - ds.truth()->beta_star).norm();
    });
    BoundCheckRow row;
    row.design = family_name(design);
    row.p = p;
    row.n = n;
    for (double e : err) row.mean_error += e;
    row.mean_error /= static_cast<double>(err.size());
    std::sort(err.begin(), err.end());
    const double level = 1.0 - rep.failure_probability;
    const auto k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(err.size())));
    row.quantile_error = err[std::clamp<std::size_t>(k, 1, err.size()) - 1];
    row.bound = rep.bound_value;
    row.failure_probability = rep.failure_probability;
    row.holds = row.quantile_error <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace chebfit
