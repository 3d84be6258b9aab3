// chebfit command-line front end.

#include <chebfit/csv.hpp>
#include <chebfit/estimators.hpp>
#include <chebfit/experiments.hpp>
#include <chebfit/theory.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace {

using namespace chebfit;

constexpr int kConfigExit = 2;
constexpr int kSolverExit = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<std::string> out_dir;
};

int run_config(const std::string& path, ExperimentKind expected, const Globals& g) {
  ExperimentConfig cfg = load_config(path);
  if (cfg.experiment != expected) {
    throw ConfigError(path + ": experiment.kind is '" + to_string(cfg.experiment) +
                      "' but the subcommand is '" + to_string(expected) + "'");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.out_dir) cfg.output_dir = *g.out_dir;
  const Index failed = run_experiment(cfg, g.jobs);
  std::cout << "wrote " << cfg.output_dir.string() << "\n";
  if (failed > 0) {
    std::cerr << failed << " cell(s) aborted\n";
    return kSolverExit;
  }
  return 0;
}

struct BoundsArgs {
  std::string design = "gaussian";
  Index n = 0;
  Index p = 0;
  double gamma = 0.1;
  double L = 3.0;
  double a = 2.0;
  double rho = 0.0;
  std::optional<std::string> csv_path;
};

int run_bounds(const BoundsArgs& b) {
  ExperimentConfig cfg;
  cfg.design_family = b.design;
  cfg.design_rho = b.rho;
  if (b.p < 1 || b.n < 1) throw ConfigError("--n and --p must be >= 1");
  const BoundReport rep = example_bound(design_for(cfg, b.p), b.n, b.gamma, b.L, b.a);

  std::vector<std::pair<std::string, double>> rows = {
      {"bound", rep.bound_value}, {"failure_probability", rep.failure_probability}};
  rows.insert(rows.end(), rep.components.begin(), rep.components.end());

  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  std::printf("design %s  n %lld  p %lld  gamma %g  L %g  a %g\n", b.design.c_str(),
              static_cast<long long>(b.n), static_cast<long long>(b.p), b.gamma, b.L, b.a);
  for (const auto& [k, v] : rows) std::printf("  %-*s  %.10g\n", static_cast<int>(width), k.c_str(), v);

  std::ostringstream csv;
  csv << "design,n,p,quantity,value\n";
  for (const auto& [k, v] : rows) {
    csv << b.design << "," << b.n << "," << b.p << "," << k << "," << csv::format_real(v) << "\n";
  }
  if (b.csv_path) {
    csv::write_text(*b.csv_path, csv.str());
  } else {
    std::cout << "\n" << csv.str();
  }
  return 0;
}

struct FitArgs {
  std::string data;
  std::string method;
  std::optional<double> a;
  std::optional<double> lambda;
  std::string out = "fit.csv";
};

int run_fit(const FitArgs& f, const Globals& g) {
  const auto est = estimator_from_tag(f.method);
  if (!est) throw ConfigError("unknown method '" + f.method + "'");
  const Dataset ds = read_dataset_csv(f.data);
  const auto need = [](const std::optional<double>& v, const char* flag) {
    if (!v) throw ConfigError(std::string("this method needs ") + flag);
    return *v;
  };
  FitResult fit;
  switch (*est) {
    case Estimator::ChebyshevLp: fit = fit_chebyshev_lp(ds); break;
    case Estimator::ChebyshevIrls: fit = fit_chebyshev_irls(ds); break;
    case Estimator::ConstrainedLs: fit = fit_constrained_ls(ds, need(f.a, "--a")); break;
    case Estimator::ChebyshevLasso:
      fit = fit_chebyshev_lasso(ds, LassoConfig{.lambda = need(f.lambda, "--lambda")});
      break;
    case Estimator::LassoCd:
      fit = fit_lasso_cd(ds, LassoConfig{.lambda = need(f.lambda, "--lambda")});
      break;
    case Estimator::Ols: fit = fit_ols(ds); break;
  }
  std::filesystem::path out = f.out;
  if (g.out_dir && out.is_relative()) out = std::filesystem::path(*g.out_dir) / out;

  std::ostringstream o;
  o << "name,value\n";
  for (Index j = 0; j < fit.beta_hat.size(); ++j) {
    o << "beta_" << (j + 1) << "," << csv::format_real(fit.beta_hat(j)) << "\n";
  }
  o << "a_hat," << csv::format_real(fit.a_hat) << "\n"
    << "lambda," << csv::format_real(fit.lambda) << "\n"
    << "iterations," << fit.iterations << "\n"
    << "status," << to_string(fit.status) << "\n";
  csv::write_text(out, o.str());
  std::cout << "method " << f.method << "  status " << to_string(fit.status) << "  a_hat "
            << fit.a_hat << "\n";
  return fit.status == SolveStatus::Optimal ? 0 : kSolverExit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev (minimax) regression estimators and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CHEBFIT_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Override the output directory");

  std::map<std::string, std::string> config_paths;
  const std::pair<const char*, ExperimentKind> experiment_cmds[] = {
      {"rate", ExperimentKind::RateCurve},
      {"lasso-compare", ExperimentKind::LassoCompare},
      {"ols-vs-cheb", ExperimentKind::OlsVsCheb},
      {"containment", ExperimentKind::Containment},
      {"bound-check", ExperimentKind::BoundCheck},
  };
  const std::map<std::string, const char*> descriptions = {
      {"rate", "Error against p/n over an (n, p) grid"},
      {"lasso-compare", "Chebyshev-LASSO against coordinate-descent LASSO"},
      {"ols-vs-cheb", "Convergence rates of the Chebyshev fit and OLS in n"},
      {"containment", "Probability that the design hull contains a ball"},
      {"bound-check", "Simulated errors against the closed-form rate bound"},
  };
  for (const auto& [name, kind] : experiment_cmds) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_paths[name], "Experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->fallthrough();
  }

  BoundsArgs b;
  auto* bounds = app.add_subcommand("bounds", "Closed-form rate bound for a design family");
  bounds->add_option("--design", b.design, "gaussian, rademacher, sphere or orthonormal")
      ->required();
  bounds->add_option("--n", b.n, "Sample size")->required();
  bounds->add_option("--p", b.p, "Dimension")->required();
  bounds->add_option("--gamma", b.gamma, "Failure budget of the containment event");
  bounds->add_option("--L", b.L, "Order-statistic tail parameter");
  bounds->add_option("--a", b.a, "Noise radius");
  bounds->add_option("--rho", b.rho, "Equicorrelation of the Gaussian design");
  bounds->add_option("--csv", b.csv_path, "Write the CSV table here instead of stdout");
  bounds->fallthrough();

  FitArgs f;
  auto* fit = app.add_subcommand("fit", "Fit one estimator to a dataset CSV");
  fit->add_option("--data", f.data, "CSV with columns y,x1,...,xp")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--method", f.method, "linf, irls, cls, cheb-lasso, lasso or ols")
      ->required()
      ->check(CLI::IsMember({"linf", "irls", "cls", "cheb-lasso", "lasso", "ols"}));
  fit->add_option("--a", f.a, "Slab radius (cls)");
  fit->add_option("--lambda", f.lambda, "Penalty (cheb-lasso, lasso)");
  fit->add_option("--out", f.out, "Output CSV");
  fit->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    for (const auto& [name, kind] : experiment_cmds) {
      if (app.got_subcommand(name)) return run_config(config_paths[name], kind, g);
    }
    if (app.got_subcommand(bounds)) return run_bounds(b);
    if (app.got_subcommand(fit)) return run_fit(f, g);
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverExit;
  }
  return 0;
}
