#include <chebfit/designs.hpp>
#include <chebfit/estimators.hpp>
#include <chebfit/model.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace chebfit;

namespace {

Dataset small_truth() {
  Matrix X(3, 2);
  X << 1, 0, 0, 1, 1, 1;
  Truth t;
  t.beta_star = Vector{{1.0, -1.0}};
  t.a = 0.5;
  t.eps = Vector{{0.25, -0.5, 0.0}};
  Vector y = X * t.beta_star + t.eps;
  return Dataset(X, y, t);
}

}  // namespace

TEST(Dataset, RejectsBadShapes) {
  EXPECT_THROW(Dataset(Matrix::Ones(3, 2), Vector::Ones(2)), DimensionError);
  EXPECT_THROW(Dataset(Matrix(0, 1), Vector(0)), DimensionError);
}

TEST(Dataset, RejectsInconsistentTruth) {
  Truth t;
  t.beta_star = Vector::Ones(1);
  t.a = 1.0;
  t.eps = Vector::Constant(2, 0.1);
  EXPECT_THROW(Dataset(Matrix::Ones(2, 1), Vector::Ones(2), t), InvalidInputError);
  t.eps = Vector::Constant(2, 2.0);
  EXPECT_THROW(Dataset(Matrix::Ones(2, 1), Vector::Constant(2, 3.0), t), InvalidInputError);
}

TEST(Residuals, ZeroBetaGivesY) {
  const Dataset ds = small_truth();
  EXPECT_EQ(residuals(ds, Vector::Zero(2)), ds.y());
}

TEST(Residuals, TruthGivesNoise) {
  const Dataset ds = small_truth();
  EXPECT_LE((residuals(ds, ds.truth()->beta_star) - ds.truth()->eps).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Residuals, HandArithmetic) {
  Matrix X(1, 2);
  X << 1, 2;
  const Dataset ds(X, Vector::Constant(1, 5.0));
  EXPECT_DOUBLE_EQ(residuals(ds, Vector::Ones(2))(0), 2.0);
  EXPECT_THROW(residuals(ds, Vector::Ones(3)), DimensionError);
}

TEST(CheckFeasible, TruthIsFeasible) {
  const Dataset ds = small_truth();
  EXPECT_TRUE(check_feasible(ds, ds.truth()->beta_star, ds.truth()->a));
  EXPECT_FALSE(check_feasible(ds, ds.truth()->beta_star, 0.0));
}

TEST(CheckFeasible, BoundaryResidualCounts) {
  // Residual exactly 0.75 in the last row.
  const Dataset ds(Matrix::Ones(2, 1), Vector{{0.25, 1.75}});
  EXPECT_DOUBLE_EQ(residuals(ds, Vector::Ones(1)).cwiseAbs().maxCoeff(), 0.75);
  EXPECT_TRUE(check_feasible(ds, Vector::Ones(1), 0.75));
  EXPECT_FALSE(check_feasible(ds, Vector::Ones(1), 0.74));
  EXPECT_THROW(check_feasible(ds, Vector::Ones(1), -1.0), InvalidInputError);
}

TEST(CriticalReport, ZeroDeviation) {
  const Dataset ds = small_truth();
  const auto rep = critical_report(ds, ds.truth()->beta_star);
  for (Index i = 0; i < ds.n(); ++i) {
    EXPECT_DOUBLE_EQ(rep.slack(i), ds.truth()->a - std::abs(ds.truth()->eps(i)));
  }
  // eps = 0 maps to sign +1, so eta = -1.
  EXPECT_EQ(rep.eta(2), -1.0);
  EXPECT_EQ(rep.order.front(), 1);
  EXPECT_EQ(rep.critical(1), std::vector<Index>{1});
}

TEST(CriticalReport, HandComputation) {
  Truth t;
  t.beta_star = Vector::Zero(1);
  t.a = 1.0;
  t.eps = Vector::Constant(1, -0.5);
  const Dataset ds(Matrix::Ones(1, 1), t.eps, t);
  const auto rep = critical_report(ds, Vector::Constant(1, 0.3));
  EXPECT_EQ(rep.eta(0), 1.0);
  EXPECT_NEAR(rep.slack(0), 0.2, 1e-15);
}

TEST(CriticalReport, RequiresTruth) {
  const Dataset ds(Matrix::Ones(2, 1), Vector::Ones(2));
  EXPECT_THROW(critical_report(ds, Vector::Ones(1)), InvalidInputError);
}

TEST(CriticalReport, ChebyshevFitsSatisfyTheInequalities) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset ds = make_dataset(GaussianDesign{Matrix::Identity(3, 3)},
                                    SparseSigned{2}, UniformNoise{1.5}, 40, seed);
    const FitResult fit = fit_chebyshev_lp(ds);
    ASSERT_EQ(fit.status, SolveStatus::Optimal);
    EXPECT_GE(critical_report(ds, fit.beta_hat).min_slack(), -1e-9);
    EXPECT_LE(fit.a_hat, ds.truth()->a + 1e-12);
    for (Index i = 0; i < ds.n(); ++i) {
      EXPECT_LE(critical_report(ds, fit.beta_hat).eta(i) * ds.truth()->eps(i), 0.0);
    }
  }
}

TEST(DatasetCsv, RoundTripWithTruth) {
  const Dataset ds = make_dataset(RademacherDesign{3}, SparseSigned{2}, UniformNoise{2.0},
                                  12, 99);
  const auto dir = std::filesystem::temp_directory_path() / "chebfit_model_test";
  const auto path = dir / "data.csv";
  write_dataset_csv(ds, path);
  ASSERT_TRUE(std::filesystem::exists(truth_sidecar_path(path)));
  const Dataset back = read_dataset_csv(path);
  EXPECT_EQ(back.X(), ds.X());
  EXPECT_EQ(back.y(), ds.y());
  ASSERT_TRUE(back.has_truth());
  EXPECT_EQ(back.truth()->beta_star, ds.truth()->beta_star);
  EXPECT_EQ(back.truth()->eps, ds.truth()->eps);
  EXPECT_EQ(back.truth()->a, ds.truth()->a);
  std::filesystem::remove_all(dir);
}

TEST(DatasetCsv, BadHeaderRejected) {
  const auto dir = std::filesystem::temp_directory_path() / "chebfit_model_test2";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bad.csv";
  {
    std::ofstream(path) << "z,x1\n1,2\n";
  }
  EXPECT_THROW(read_dataset_csv(path), InvalidInputError);
  std::filesystem::remove_all(dir);
}
