#include <chebfit/estimators.hpp>
#include <chebfit/random.hpp>
#include <chebfit/theory.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace chebfit;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(OrderStatBound, Values) {
  EXPECT_NEAR(order_stat_tail_bound(10, 1, 3.0), std::exp(-4.5 / 5.0), 1e-15);
  EXPECT_NEAR(order_stat_tail_bound(10, 1, 3.0), 0.4066, 1e-4);
  EXPECT_GT(order_stat_tail_bound(10, 3, 1e-8), 1.0 - 1e-12);
  EXPECT_THROW(order_stat_tail_bound(5, 6, 1.0), InvalidInputError);
}

TEST(OrderStatBound, DominatesSimulation) {
  const auto est = order_stat_tail_frequency(1000, 10, 2.0, 100000, 11);
  EXPECT_LE(est.value, order_stat_tail_bound(1000, 10, 2.0));
  // Deterministic given the seed.
  EXPECT_EQ(order_stat_tail_frequency(50, 3, 1.0, 1000, 4).value,
            order_stat_tail_frequency(50, 3, 1.0, 1000, 4).value);
}

TEST(ANThreshold, UniformClosedForm) {
  const double a = 1.7;
  for (auto [n, K, L] : {std::tuple{100, 5, 1.0}, {1000, 10, 2.0}, {50, 2, 3.5}}) {
    EXPECT_NEAR(a_n_threshold(UniformNoise{a}, n, K, L), a * K * (L + 1.0) / n, 1e-9);
  }
  EXPECT_EQ(a_n_threshold(UniformNoise{a}, 10, 10, 1.0), 2.0 * a);
}

TEST(ANThreshold, TriangularDensityMatchesRoot) {
  // Density 1 - |t| on [-1, 1]: 1 - F(1 - t) = t^2 / 2 for t in [0, 1].
  const auto cdf = [](double x) {
    x = std::clamp(x, -1.0, 1.0);
    return x <= 0.0 ? 0.5 * (1.0 + x) * (1.0 + x) : 1.0 - 0.5 * (1.0 - x) * (1.0 - x);
  };
  const Index n = 100, K = 5;
  const double L = 1.0;
  // Root of 2n t^2 / 2 = K (L + 1).
  const double root = std::sqrt(K * (L + 1.0) / static_cast<double>(n));
  EXPECT_NEAR(a_n_threshold(SymmetricBoundedNoise{1.0, cdf, {}}, n, K, L), root, 1e-9);
}

TEST(PaleyZygmund, GaussianExample) {
  PZParams pz;
  pz.c = 8.0 * kPi;
  pz.moment_lower = std::sqrt(2.0 / kPi);
  pz.moment_upper = 1.0;
  const PZResult r = paley_zygmund_params(pz);
  EXPECT_NEAR(r.rho, 0.5 - 1.0 / (8.0 * kPi), 1e-15);
  EXPECT_NEAR(r.xi, std::sqrt(1.0 / (8.0 * kPi)), 1e-15);
  EXPECT_TRUE(r.in_regime);
}

TEST(PaleyZygmund, RademacherExample) {
  PZParams pz;
  pz.c = 32.0;
  pz.moment_lower = 1.0 / std::sqrt(2.0);
  pz.moment_upper = 1.0;
  const PZResult r = paley_zygmund_params(pz);
  EXPECT_NEAR(r.rho, 15.0 / 32.0, 1e-15);
  EXPECT_NEAR(r.xi, 1.0 / (4.0 * std::sqrt(2.0)), 1e-15);
}

TEST(PaleyZygmund, ThetaNearOneLeavesRegime) {
  PZParams pz;
  pz.theta = 1.0 - 1e-9;
  pz.c = 4.0;
  const PZResult r = paley_zygmund_params(pz);
  EXPECT_NEAR(r.rho, 0.25 + 0.5, 1e-8);
  EXPECT_FALSE(r.in_regime);
  EXPECT_NEAR(r.xi, 0.5, 1e-8);
  pz.theta = 1.0;
  EXPECT_THROW(paley_zygmund_params(pz), InvalidInputError);
}

TEST(ContainmentBound, ClampAndSquaring) {
  EXPECT_EQ(containment_prob_bound(1.0, 0.4, 1.0, 2, 0), 1.0);
  const double xi = 0.5, rho = 0.3, ups = 2.0;
  const Index p = 3;
  const double front = std::pow(1.0 + 2.0 * ups / xi, p);
  for (Index m : {60, 90, 150}) {
    const double b1 = containment_prob_bound(xi, rho, ups, p, m);
    const double b2 = containment_prob_bound(xi, rho, ups, p, 2 * m);
    ASSERT_LT(b1, 1.0);
    EXPECT_NEAR(b2 * front, b1 * b1, 1e-12 * b1 * b1);
  }
}

TEST(ContainmentBound, GaussianThresholdGivesGamma) {
  const BoundReport rep = example_bound(GaussianDesign{Matrix::Identity(2, 2)}, 1000, 0.1, 3.0, 2.0);
  const auto m = static_cast<Index>(std::ceil(rep.component("m_required")));
  EXPECT_LE(containment_prob_bound(rep.component("xi"), rep.component("rho"),
                                   rep.component("upsilon"), 2, m),
            0.1);
}

TEST(RateBound, OrthonormalExample) {
  const double a = 2.0, L = 3.0, gamma = 0.1;
  const Index p = 3, n = 500;
  const double f = 2.0 * p * std::log(2.0 * p / gamma);
  const BoundReport rep = rate_bound(f, gamma, 1.0, a, L, n);
  EXPECT_LE(rep.bound_value, a * (L + 1.0) * (f + 1.0) / n);
  EXPECT_GE(rep.bound_value, a * (L + 1.0) * f / n);
  EXPECT_NEAR(rep.failure_probability, gamma + std::exp(-4.5 / 5.0), 1e-15);
  EXPECT_LT(rate_bound(f, gamma, 1.0, a, L, 100000000).bound_value, 1e-5);
  const BoundReport ex = example_bound(OrthonormalDesign{Matrix::Identity(p, p)}, n, gamma, L, a);
  EXPECT_DOUBLE_EQ(ex.bound_value, rep.bound_value);
}

TEST(RateBound, GaussianExampleDisplay) {
  Matrix sigma(2, 2);
  sigma << 2.0, 0.5, 0.5, 1.0;
  const double lmin = (3.0 - std::sqrt(2.0)) / 2.0;
  const double tr = 3.0, gamma = 0.05, L = 2.0, a = 1.5;
  const Index n = 4000;
  const double xi = std::sqrt(lmin / (8.0 * kPi));
  const double f = 8.0 * kPi * 2.0 *
                       std::log(1.0 + 32.0 * std::sqrt(2.0) * std::pow(kPi, 1.5) *
                                          std::sqrt(tr) / std::sqrt(lmin)) +
                   8.0 * kPi * std::log(1.0 / gamma);
  const BoundReport rep = example_bound(GaussianDesign{sigma}, n, gamma, L, a);
  EXPECT_NEAR(rep.component("xi"), xi, 1e-14);
  EXPECT_NEAR(rep.component("f"), f, 1e-10);
  EXPECT_NEAR(rep.bound_value, a * (L + 1.0) * std::ceil(f) / (xi * n), 1e-12);
}

TEST(ExampleBound, RademacherAndSphere) {
  const double gamma = 0.1;
  const Index p = 5;
  const BoundReport r = example_bound(RademacherDesign{p}, 1000, gamma, 3.0, 2.0);
  EXPECT_NEAR(r.component("m_required"),
              32.0 * (p * std::log(1.0 + 256.0 * std::sqrt(2.0) * std::sqrt(5.0)) +
                      std::log(1.0 / gamma)),
              1e-10);
  EXPECT_NEAR(r.component("xi"), 1.0 / (4.0 * std::sqrt(2.0)), 1e-15);
  const BoundReport s = example_bound(SphereDesign{p}, 1000, gamma, 3.0, 2.0);
  const double xi = std::sqrt(1.0 / (8.0 * kPi * p));
  EXPECT_NEAR(s.component("xi"), xi, 1e-15);
  EXPECT_NEAR(s.component("m_required"),
              8.0 * kPi * (p * std::log(1.0 + 16.0 * kPi / xi) + std::log(1.0 / gamma)), 1e-10);
  EXPECT_THROW(example_bound(CauchyDesign{2}, 100, gamma, 3.0, 2.0), UnsupportedFamilyError);
}

TEST(ExampleBound, EllipticalWithUnitRadiusIsTheSphereCase) {
  // R = 1: c = 8 pi, rho = 1/2 - 1/(8 pi), xi = sqrt(2/pi) / (4 sqrt(p)).
  const Index p = 3;
  const BoundReport e = example_bound(EllipticalDesign{[](double) { return 1.0; },
                                                       Matrix::Identity(p, p)},
                                      1000, 0.1, 3.0, 2.0);
  EXPECT_NEAR(e.component("rho"), 0.5 - 1.0 / (8.0 * kPi), 1e-12);
  EXPECT_NEAR(e.component("xi"), std::sqrt(2.0 / kPi) / (4.0 * std::sqrt(3.0)), 1e-12);
}

TEST(ExampleBound, GeneralMoment) {
  const double lmin = 0.8, C = 3.0, gamma = 0.2;
  const Index p = 4;
  const BoundReport g = general_moment_bound(p, lmin, C, 10000, gamma, 3.0, 1.0);
  EXPECT_NEAR(g.component("xi"), std::sqrt(lmin) / (2.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(g.component("m_required"),
              16.0 * C / (lmin * lmin) *
                  (p * std::log(1.0 + 64.0 * std::sqrt(2.0) * std::pow(C, 1.25) /
                                          std::pow(lmin, 2.5) * 2.0) +
                   std::log(1.0 / gamma)),
              1e-9);
  // The threshold makes the containment bound at most gamma.
  const auto m = static_cast<Index>(std::ceil(g.component("m_required")));
  EXPECT_LE(containment_prob_bound(g.component("xi"), g.component("rho"), g.component("upsilon"),
                                   p, m),
            gamma * (1.0 + 1e-9));
}

TEST(Minimax, OrthonormalFormula) {
  EXPECT_DOUBLE_EQ(minimax_risk_orthonormal(2.0, 4, 100), 4e-4);
  EXPECT_DOUBLE_EQ(minimax_risk_orthonormal(4.0, 4, 100), 4.0 * 4e-4);
}

TEST(Minimax, MonteCarloOrthonormal) {
  const double c = std::sqrt(0.5);
  Matrix basis(2, 2);
  basis << c, -c, c, c;
  const auto est = minimax_risk_mc(OrthonormalDesign{basis}, 100, 2.0, 200000, 3, basis);
  EXPECT_NEAR(est.value / minimax_risk_orthonormal(2.0, 2, 100), 1.0, 0.03);
  EXPECT_TRUE(est.fixed_rotation);
  const auto half = minimax_risk_mc(OrthonormalDesign{basis}, 200, 2.0, 200000, 3, basis);
  EXPECT_NEAR(half.value * 4.0, est.value, 1e-15 * est.value);
}

TEST(Minimax, MonteCarloGaussian) {
  const Index p = 3, n = 50;
  const double a = 2.0;
  const auto est = minimax_risk_mc(GaussianDesign{Matrix::Identity(p, p)}, n, a, 400000, 8);
  EXPECT_NEAR(est.max_abs_moment, std::sqrt(2.0 / kPi), 4.0 * est.std_error + 1e-3);
  EXPECT_NEAR(est.value, a * a * p / (16.0 * n * n * (2.0 / kPi)), 0.02 * est.value);
}

TEST(ModdedLowerBound, Values) {
  EXPECT_DOUBLE_EQ(modded_lower_bound(4.0, 1.0), 1.0);
  EXPECT_NEAR(modded_lower_bound(2.0, std::sqrt(2.0 / kPi)), 4.0 * kPi / 32.0, 1e-15);
  EXPECT_DOUBLE_EQ(modded_lower_bound(6.0, 0.7), 9.0 * modded_lower_bound(2.0, 0.7));
}

TEST(ConstrainedLsBound, Values) {
  EXPECT_DOUBLE_EQ(constrained_ls_bound(4, 100, 1.0, 2.0), 0.4);
  EXPECT_EQ(constrained_ls_bound(0, 100, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(constrained_ls_bound(4, 100, 3.0), 3.0 * constrained_ls_bound(4, 100, 1.0));
}

TEST(ChebLassoBound, Branches) {
  const double a = 2.0, L = 3.0, kappa = 0.5, alpha = 0.4;
  const Index n = 1000, s = 4;
  const double ln = std::log(static_cast<double>(n));
  const double scale = std::pow(n, 1.0 - alpha);
  // At lambda = kappa / (4 sqrt(s) log n) the branches coincide exactly.
  const double tie = kappa / (4.0 * std::sqrt(4.0) * ln);
  EXPECT_NEAR(cheb_lasso_bound(a, tie, n, alpha, s, kappa, L),
              24.0 * (L + 1.0) * a * 2.0 * ln / (kappa * scale), 1e-12);
  // Larger lambda: the second branch dominates.
  EXPECT_DOUBLE_EQ(cheb_lasso_bound(a, 10 * tie, n, alpha, s, kappa, L),
                   24.0 * (L + 1.0) * a * 2.0 * ln / (kappa * scale));
  EXPECT_DOUBLE_EQ(cheb_lasso_bound(a, tie / 10, n, alpha, s, kappa, L),
                   6.0 * (L + 1.0) * a / (tie / 10 * scale));
  EXPECT_EQ(cheb_lasso_bound(0.0, tie, n, alpha, s, kappa, L), 0.0);
  EXPECT_LT(cheb_lasso_bound(a, tie, 100000000, alpha, s, kappa, L),
            cheb_lasso_bound(a, tie, n, alpha, s, kappa, L) / 100.0);
}

TEST(RestrictedEigenvalue, IdentityGram) {
  const auto r = check_re_empirical(Matrix::Identity(5, 5), {1.0, 2.0, 2}, 200, 1);
  EXPECT_NEAR(r.min_ratio, 1.0, 1e-12);
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(check_re_empirical(Matrix::Identity(5, 5), {1.01, 2.0, 2}, 200, 1).holds);
}

TEST(RestrictedEigenvalue, DiagonalRefutation) {
  Matrix A = Matrix::Identity(2, 2);
  A(1, 1) = 0.1;
  const auto r = check_re_empirical(A, {0.5, 2.0, 1}, 300, 2);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.min_ratio, 0.1, 1e-12);
  EXPECT_GT(std::abs(r.witness(1)), 0.99);
}

TEST(RestrictedEigenvalue, EquicorrelatedMatchesGrid) {
  const Index p = 6;
  const double gamma = 1.0;
  const Matrix A = 0.5 * Matrix::Identity(p, p) + 0.5 * Matrix::Ones(p, p);
  const auto r = check_re_empirical(A, {0.5, gamma, 2}, 3000, 3);
  // Grid over {-1, -1/2, 0, 1/2, 1}^6 restricted to the union of cones.
  double grid = infinity<double>();
  Vector v(p);
  for (int code = 0; code < 15625; ++code) {
    int c = code;
    for (Index j = 0; j < p; ++j, c /= 5) v(j) = 0.5 * (c % 5) - 1.0;
    if (v.squaredNorm() == 0.0) continue;
    std::vector<double> mags(v.data(), v.data() + p);
    for (double& m : mags) m = std::abs(m);
    std::sort(mags.rbegin(), mags.rend());
    const double in = mags[0] + mags[1];
    const double out = v.lpNorm<1>() - in;
    if (out <= gamma * in) grid = std::min(grid, v.dot(A * v) / v.squaredNorm());
  }
  EXPECT_NEAR(r.min_ratio, grid, 0.02);
  EXPECT_THROW(check_re_empirical(Matrix::Identity(17, 17), {0.5, 1.0, 2}, 10, 0),
               InvalidInputError);
}

// For each family the (1 - failure) quantile of the estimation error over
// 100 replications stays below the rate bound.
TEST(RateBound, DominatesSimulatedErrors) {
  const Index p = 2;
  const double a = 2.0, gamma = 0.1, L = 3.0;
  const std::vector<DesignSpec> designs = {OrthonormalDesign{Matrix::Identity(p, p)},
                                           GaussianDesign{Matrix::Identity(p, p)},
                                           RademacherDesign{p}, SphereDesign{p}};
  for (const auto& d : designs) {
    for (Index n : {200, 400, 800}) {
      const BoundReport rep = example_bound(d, n, gamma, L, a);
      std::vector<double> err;
      for (int rep_id = 0; rep_id < 100; ++rep_id) {
        const Dataset ds = make_dataset(d, HalfOnes{}, UniformNoise{a}, n,
                                        rng::derive_seed(42, {static_cast<std::uint64_t>(n),
                                                              static_cast<std::uint64_t>(rep_id)}));
        err.push_back((fit_chebyshev_lp(ds).beta_hat - ds.truth()->beta_star).norm());
      }
      std::sort(err.begin(), err.end());
      const auto k = static_cast<std::size_t>(
          std::ceil((1.0 - rep.failure_probability) * static_cast<double>(err.size()))) - 1;
      EXPECT_LE(err[std::min(k, err.size() - 1)], rep.bound_value) << family_name(d) << " n=" << n;
    }
  }
}
