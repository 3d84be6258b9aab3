#pragma once

#include <chebfit/designs.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace chebfit {

/// Thrown by example_bound for design families without a closed-form bound.
class UnsupportedFamilyError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// exp(-K L^2 / 2 / ((4/3) L + 1)), an upper bound on
/// P(|eps|_(K) / a < 1 - K (L + 1) / n) for uniform noise.
double order_stat_tail_bound(Index n, Index K, double L);

struct FrequencyEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Index trials = 0;
};

/// Monte-Carlo frequency of the event above with |eps_i| / a ~ U(0, 1).
FrequencyEstimate order_stat_tail_frequency(Index n, Index K, double L, Index trials,
                                            std::uint64_t seed);

/// inf{t in [0, 2a] : 2n (1 - F(a - t)) > K (L + 1)} by bisection; 2a when
/// the set is empty.
double a_n_threshold(const NoiseSpec& noise, Index n, Index K, double L);

struct PZParams {
  double theta = 0.5;
  double q = 2.0;
  double alpha = 1.0;
  double c = 1.0;
  double moment_lower = 1.0;  // inf_v E|<v, X>|^alpha
  double moment_upper = 1.0;  // sup_v E|<v, X>|^(q alpha)
  double norm_mean = 1.0;     // E ||X||
};

struct PZResult {
  double rho = 0.0;
  double xi = 0.0;
  double upsilon = 0.0;  // c * E||X||
  bool in_regime = false;  // rho < 1/2
};

/// Small-ball parameters from moment ratios. Out-of-regime values are
/// returned with in_regime = false.
PZResult paley_zygmund_params(const PZParams& pz);

/// min(1, (1 + 2 upsilon / xi)^p (1/2 + rho)^m).
double containment_prob_bound(double xi, double rho, double upsilon, Index p, Index m);

struct BoundReport {
  double bound_value = 0.0;
  double failure_probability = 0.0;
  std::vector<std::pair<std::string, double>> components;

  // Throws InvalidInputError when `name` is absent.
  double component(const std::string& name) const;
};

/// a (L + 1) ceil(f) / (xi n) with failure probability
/// gamma + exp(-L^2 / 2 / ((4/3) L + 1)).
BoundReport rate_bound(double f_val, double gamma, double xi, double a, double L, Index n);

/// Per-family sample threshold f(p, gamma), radius xi and the resulting rate
/// bound. Components: xi, rho, upsilon, f, m_required, L. Elliptical designs
/// use numerically integrated E R and E R^2; `c_prime` is the absolute
/// constant of that case. Cauchy designs throw UnsupportedFamilyError.
BoundReport example_bound(const DesignSpec& design, Index n, double gamma, double L, double a,
                          double c_prime = 1.0);

/// Same for a design known only through lambda_min = inf_v E (v'X)^2 and
/// C >= sup_v E (v'X)^4.
BoundReport general_moment_bound(Index p, double lambda_min, double fourth_moment, Index n,
                                 double gamma, double L, double a);

/// a^2 p^2 / (16 n^2).
double minimax_risk_orthonormal(double a, Index p, Index n);

struct MinimaxEstimate {
  double value = 0.0;
  // max_j E|(X'R)_j| and its Monte-Carlo standard error.
  double max_abs_moment = 0.0;
  double std_error = 0.0;
  // Always true: R is fixed instead of optimized, so `value` is the inner
  // expression at one rotation and is not a bound in either direction.
  bool fixed_rotation = true;
};

/// a^2 p / (16 (n max_j E|(X'R)_j|)^2) with the expectation replaced by a
/// sample mean over `samples` design rows. An empty `rotation` means R = I.
MinimaxEstimate minimax_risk_mc(const DesignSpec& design, Index n, double a, Index samples,
                                std::uint64_t seed, const Matrix& rotation = Matrix());

/// a^2 / (16 m^2) with m = inf_v E|X'v|.
double modded_lower_bound(double a, double inf_abs_moment);

/// C sqrt(p / n) ||Sigma^{-1}||_op.
double constrained_ls_bound(Index p, Index n, double sigma_inv_opnorm, double C = 1.0);

/// max(6 (L + 1) a / (lambda n^{1-alpha}), 24 (L + 1) a sqrt(s) log n / (kappa n^{1-alpha})).
double cheb_lasso_bound(double a, double lambda, Index n, double alpha_exp, Index s,
                        double kappa, double L);

struct REParams {
  double kappa = 1.0;
  double gamma_cone = 1.0;
  Index s = 1;
};

struct RECheck {
  bool holds = false;
  double min_ratio = 0.0;
  Vector witness;
};

/// Samples directions of the cones ||v_{S^c}||_1 <= gamma ||v_S||_1 for every
/// |S| = s and records min v'Av / ||v||^2. Refutation is certain,
/// confirmation is approximate. Needs p <= 16.
RECheck check_re_empirical(const Matrix& gram, const REParams& re, Index samples_per_subset,
                           std::uint64_t seed);

}  // namespace chebfit
