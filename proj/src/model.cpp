#include <chebfit/model.hpp>

#include <chebfit/csv.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace chebfit {

namespace {

constexpr double kFeasTol = 1e-9;

void check_core(const Matrix& X, const Vector& y) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw DimensionError("dataset: need n >= 1 and p >= 1");
  }
  if (y.size() != X.rows()) {
    throw DimensionError("dataset: y has " + std::to_string(y.size()) +
                         " entries, X has " + std::to_string(X.rows()) + " rows");
  }
  if (!all_finite(X) || !all_finite(y)) {
    throw InvalidInputError("dataset: non-finite entries");
  }
}

}  // namespace

Dataset::Dataset(Matrix X, Vector y) : X_(std::move(X)), y_(std::move(y)) {
  check_core(X_, y_);
}

Dataset::Dataset(Matrix X, Vector y, Truth truth)
    : X_(std::move(X)), y_(std::move(y)), truth_(std::move(truth)) {
  check_core(X_, y_);
  const Truth& t = *truth_;
  if (t.beta_star.size() != X_.cols() || t.eps.size() != X_.rows()) {
    throw DimensionError("dataset: truth dimensions do not match X");
  }
  if (!(t.a > 0.0) || !std::isfinite(t.a)) {
    throw InvalidInputError("dataset: noise radius must be positive");
  }
  const Vector model = X_ * t.beta_star + t.eps;
  for (Index i = 0; i < y_.size(); ++i) {
    if (std::abs(model(i) - y_(i)) > 1e-12 * std::max(1.0, std::abs(y_(i)))) {
      throw InvalidInputError("dataset: y != X beta_star + eps at row " +
                              std::to_string(i));
    }
    if (std::abs(t.eps(i)) > t.a) {
      throw InvalidInputError("dataset: |eps| exceeds a at row " + std::to_string(i));
    }
  }
}

const Truth& Dataset::require_truth() const {
  if (!truth_) throw InvalidInputError("dataset: operation requires a truth payload");
  return *truth_;
}

const char* tag(Estimator e) {
  switch (e) {
    case Estimator::ChebyshevLp: return "linf";
    case Estimator::ChebyshevIrls: return "irls";
    case Estimator::ConstrainedLs: return "cls";
    case Estimator::ChebyshevLasso: return "cheb-lasso";
    case Estimator::LassoCd: return "lasso";
    case Estimator::Ols: return "ols";
  }
  return "unknown";
}

std::optional<Estimator> estimator_from_tag(std::string_view t) {
  for (Estimator e : {Estimator::ChebyshevLp, Estimator::ChebyshevIrls,
                      Estimator::ConstrainedLs, Estimator::ChebyshevLasso,
                      Estimator::LassoCd, Estimator::Ols}) {
    if (t == tag(e)) return e;
  }
  return std::nullopt;
}

double CriticalInequalityReport::min_slack() const {
  return slack.size() == 0 ? 0.0 : slack.minCoeff();
}

std::vector<Index> CriticalInequalityReport::critical(Index K) const {
  K = std::clamp<Index>(K, 0, static_cast<Index>(order.size()));
  return {order.begin(), order.begin() + K};
}

Vector residuals(const Dataset& ds, const Vector& beta) {
  if (beta.size() != ds.p()) {
    throw DimensionError("residuals: beta has " + std::to_string(beta.size()) +
                         " entries, expected " + std::to_string(ds.p()));
  }
  return ds.y() - ds.X() * beta;
}

bool check_feasible(const Dataset& ds, const Vector& beta, double a) {
  if (!(a >= 0.0)) throw InvalidInputError("check_feasible: a must be >= 0");
  return residuals(ds, beta).cwiseAbs().maxCoeff() <= a + kFeasTol;
}

CriticalInequalityReport critical_report(const Dataset& ds, const Vector& beta_hat) {
  const Truth& t = ds.require_truth();
  if (beta_hat.size() != ds.p()) throw DimensionError("critical_report: beta size");
  CriticalInequalityReport rep;
  const Index n = ds.n();
  rep.eta.resize(n);
  for (Index i = 0; i < n; ++i) rep.eta(i) = t.eps(i) >= 0.0 ? -1.0 : 1.0;
  const Vector proj = ds.X() * (beta_hat - t.beta_star);
  rep.slack = (t.a - t.eps.array().abs()) - rep.eta.array() * proj.array();
  rep.order.resize(static_cast<std::size_t>(n));
  std::iota(rep.order.begin(), rep.order.end(), Index{0});
  std::stable_sort(rep.order.begin(), rep.order.end(), [&](Index i, Index j) {
    return std::abs(t.eps(i)) > std::abs(t.eps(j));
  });
  return rep;
}

std::filesystem::path truth_sidecar_path(const std::filesystem::path& data_path) {
  std::filesystem::path out = data_path;
  out.replace_extension(".truth.csv");
  return out;
}

void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "y";
  for (Index j = 0; j < ds.p(); ++j) os << ",x" << (j + 1);
  os << '\n';
  for (Index i = 0; i < ds.n(); ++i) {
    os << csv::format_real(ds.y()(i));
    for (Index j = 0; j < ds.p(); ++j) os << ',' << csv::format_real(ds.X()(i, j));
    os << '\n';
  }
  csv::write_text(path, os.str());

  if (!ds.has_truth()) return;
  const Truth& t = *ds.truth();
  std::ostringstream ts;
  ts << "kind,index,value\n";
  ts << "a,0," << csv::format_real(t.a) << '\n';
  for (Index j = 0; j < t.beta_star.size(); ++j) {
    ts << "beta_star," << (j + 1) << ',' << csv::format_real(t.beta_star(j)) << '\n';
  }
  for (Index i = 0; i < t.eps.size(); ++i) {
    ts << "eps," << (i + 1) << ',' << csv::format_real(t.eps(i)) << '\n';
  }
  csv::write_text(truth_sidecar_path(path), ts.str());
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path);
  if (table.header.empty() || table.header[0] != "y") {
    throw InvalidInputError(path.string() + ": header must start with 'y'");
  }
  const Index p = static_cast<Index>(table.header.size()) - 1;
  if (p < 1) throw InvalidInputError(path.string() + ": no covariate columns");
  for (Index j = 0; j < p; ++j) {
    if (table.header[static_cast<std::size_t>(j + 1)] != "x" + std::to_string(j + 1)) {
      throw InvalidInputError(path.string() + ": expected column x" +
                              std::to_string(j + 1));
    }
  }
  const Index n = static_cast<Index>(table.rows.size());
  if (n < 1) throw InvalidInputError(path.string() + ": no data rows");
  Matrix X(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::string ctx = path.string() + " row " + std::to_string(i + 1);
    y(i) = csv::parse_real(row[0], ctx);
    for (Index j = 0; j < p; ++j) {
      X(i, j) = csv::parse_real(row[static_cast<std::size_t>(j + 1)], ctx);
    }
  }

  const auto side = truth_sidecar_path(path);
  if (!std::filesystem::exists(side)) return Dataset(std::move(X), std::move(y));

  const csv::Table tt = csv::read(side);
  if (tt.column("kind") != 0 || tt.column("index") != 1 || tt.column("value") != 2) {
    throw InvalidInputError(side.string() + ": header must be kind,index,value");
  }
  Truth t;
  t.beta_star = Vector::Zero(p);
  t.eps = Vector::Zero(n);
  bool have_a = false;
  for (const auto& row : tt.rows) {
    const std::string ctx = side.string();
    const double v = csv::parse_real(row[2], ctx);
    const long long idx = csv::parse_integer(row[1], ctx);
    if (row[0] == "a") {
      t.a = v;
      have_a = true;
    } else if (row[0] == "beta_star" && idx >= 1 && idx <= p) {
      t.beta_star(idx - 1) = v;
    } else if (row[0] == "eps" && idx >= 1 && idx <= n) {
      t.eps(idx - 1) = v;
    } else {
      throw InvalidInputError(ctx + ": bad entry '" + row[0] + "," + row[1] + "'");
    }
  }
  if (!have_a) throw InvalidInputError(side.string() + ": missing noise radius 'a'");
  return Dataset(std::move(X), std::move(y), std::move(t));
}

}  // namespace chebfit
