#include <chebfit/random.hpp>
#include <chebfit/theory.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <bit>
#include <numbers>

namespace chebfit {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw InvalidInputError(std::string(name) + " must be finite and > 0");
  }
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double lambda_term(double L) { return std::exp(-L * L / 2.0 / (4.0 / 3.0 * L + 1.0)); }

// Eigenvalues of a symmetric matrix, ascending.
Vector sym_eigenvalues(const Matrix& S) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues();
}

BoundReport finish(double f, double xi, double rho, double upsilon, double gamma, double L,
                   double a, Index n) {
  BoundReport out = rate_bound(f, gamma, xi, a, L, n);
  out.components = {{"xi", xi}, {"rho", rho}, {"upsilon", upsilon},
                    {"f", f},   {"m_required", f}, {"L", L}};
  return out;
}

}  // namespace

double order_stat_tail_bound(Index n, Index K, double L) {
  if (n < 1 || K < 1 || K > n) throw InvalidInputError("order statistic bound needs 1 <= K <= n");
  require_positive(L, "L");
  return std::exp(-static_cast<double>(K) * L * L / 2.0 / (4.0 / 3.0 * L + 1.0));
}

FrequencyEstimate order_stat_tail_frequency(Index n, Index K, double L, Index trials,
                                            std::uint64_t seed) {
  order_stat_tail_bound(n, K, L);
  if (trials < 1) throw InvalidInputError("trials must be >= 1");
  const double threshold =
      1.0 - static_cast<double>(K) * (L + 1.0) / static_cast<double>(n);
  rng::Stream s(seed);
  Index hits = 0;
  for (Index t = 0; t < trials; ++t) {
    // The K-th largest value is below the threshold iff fewer than K reach it.
    Index above = 0;
    for (Index i = 0; i < n; ++i) above += s.uniform() >= threshold;
    hits += above < K;
  }
  FrequencyEstimate out;
  out.trials = trials;
  out.value = static_cast<double>(hits) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(trials));
  return out;
}

double a_n_threshold(const NoiseSpec& noise, Index n, Index K, double L) {
  validate(noise);
  if (n < 1 || K < 1) throw InvalidInputError("a_n threshold needs n, K >= 1");
  require_positive(L, "L");
  const double a = noise_radius(noise);
  const auto cdf = [&](double x) {
    if (const auto* u = std::get_if<UniformNoise>(&noise)) {
      return std::clamp((x + u->a) / (2.0 * u->a), 0.0, 1.0);
    }
    return std::get<SymmetricBoundedNoise>(noise).cdf(x);
  };
  const double target = static_cast<double>(K) * (L + 1.0);
  const auto qualifies = [&](double t) {
    return 2.0 * static_cast<double>(n) * (1.0 - cdf(a - t)) > target;
  };
  if (!qualifies(2.0 * a)) return 2.0 * a;
  double lo = 0.0;
  double hi = 2.0 * a;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (qualifies(mid) ? hi : lo) = mid;
  }
  return hi;
}

PZResult paley_zygmund_params(const PZParams& pz) {
  if (!(pz.theta >= 0.0 && pz.theta < 1.0)) throw InvalidInputError("theta must be in [0, 1)");
  if (!(pz.q > 1.0)) throw InvalidInputError("q must be > 1");
  require_positive(pz.alpha, "alpha");
  require_positive(pz.c, "c");
  require_positive(pz.moment_lower, "moment_lower");
  require_positive(pz.moment_upper, "moment_upper");
  require_positive(pz.norm_mean, "norm_mean");
  const double ratio = std::pow((1.0 - pz.theta) * pz.moment_lower, pz.q / (pz.q - 1.0)) /
                       std::pow(pz.moment_upper, 1.0 / (pz.q - 1.0));
  PZResult out;
  out.rho = 1.0 / pz.c + (1.0 - ratio) / 2.0;
  out.xi = std::pow(pz.theta * pz.moment_lower, 1.0 / pz.alpha) / 2.0;
  out.upsilon = pz.c * pz.norm_mean;
  out.in_regime = out.rho < 0.5;
  return out;
}

double containment_prob_bound(double xi, double rho, double upsilon, Index p, Index m) {
  require_positive(xi, "xi");
  require_positive(upsilon, "upsilon");
  if (!(rho >= 0.0) || p < 1 || m < 0) throw InvalidInputError("containment bound: bad arguments");
  const double log_bound = static_cast<double>(p) * std::log1p(2.0 * upsilon / xi) +
                           static_cast<double>(m) * std::log(0.5 + rho);
  return log_bound >= 0.0 ? 1.0 : std::exp(log_bound);
}

double BoundReport::component(const std::string& name) const {
  for (const auto& [key, value] : components)
    if (key == name) return value;
  throw InvalidInputError("bound report has no component '" + name + "'");
}

BoundReport rate_bound(double f_val, double gamma, double xi, double a, double L, Index n) {
  require_positive(f_val, "f");
  require_positive(gamma, "gamma");
  require_positive(xi, "xi");
  require_positive(a, "a");
  require_positive(L, "L");
  if (n < 1) throw InvalidInputError("n must be >= 1");
  BoundReport out;
  out.bound_value = a * (L + 1.0) * std::ceil(f_val) / (xi * static_cast<double>(n));
  out.failure_probability = clamp01(gamma + lambda_term(L));
  out.components = {{"xi", xi}, {"f", f_val}, {"L", L}};
  return out;
}

BoundReport example_bound(const DesignSpec& design, Index n, double gamma, double L, double a,
                          double c_prime) {
  validate(design);
  require_positive(gamma, "gamma");
  require_positive(c_prime, "c_prime");
  const double p = static_cast<double>(dimension(design));
  const double log_inv_gamma = std::log(1.0 / gamma);
  const double small_ball = 0.5 - 1.0 / (8.0 * kPi);

  if (const auto* g = std::get_if<GaussianDesign>(&design)) {
    const double lmin = sym_eigenvalues(g->sigma)(0);
    const double tr = g->sigma.trace();
    const double xi = std::sqrt(lmin / (8.0 * kPi));
    const double f =
        8.0 * kPi * p *
            std::log1p(32.0 * std::sqrt(2.0) * std::pow(kPi, 1.5) * std::sqrt(tr / lmin)) +
        8.0 * kPi * log_inv_gamma;
    return finish(f, xi, small_ball, 8.0 * kPi * std::sqrt(tr), gamma, L, a, n);
  }
  if (std::holds_alternative<RademacherDesign>(design)) {
    const double xi = 1.0 / (4.0 * std::sqrt(2.0));
    const double f =
        32.0 * (p * std::log1p(256.0 * std::sqrt(2.0) * std::sqrt(p)) + log_inv_gamma);
    return finish(f, xi, 15.0 / 32.0, 32.0 * std::sqrt(p), gamma, L, a, n);
  }
  if (std::holds_alternative<SphereDesign>(design)) {
    const double xi = std::sqrt(1.0 / (8.0 * kPi * p));
    const double f = 8.0 * kPi * (p * std::log1p(16.0 * kPi / xi) + log_inv_gamma);
    return finish(f, xi, small_ball, 8.0 * kPi, gamma, L, a, n);
  }
  if (const auto* e = std::get_if<EllipticalDesign>(&design)) {
    // E R and E R^2 by the midpoint rule on the quantile function.
    constexpr int kNodes = 200000;
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k < kNodes; ++k) {
      const double r = e->radial_quantile((k + 0.5) / kNodes);
      m1 += r;
      m2 += r * r;
    }
    m1 /= kNodes;
    m2 /= kNodes;
    require_positive(m1, "E R");
    const Vector ev = sym_eigenvalues(e->A * e->A.transpose());
    const double lmin = ev(0), lmax = ev(ev.size() - 1);
    const double c = 8.0 * kPi * m2 / (m1 * m1);
    const double xi = m1 * std::sqrt(lmin) * std::sqrt(2.0 / kPi) / (4.0 * std::sqrt(p));
    const double f = c * (p * std::log1p(c_prime * std::sqrt(p) * std::pow(m2, 1.5) *
                                         std::sqrt(lmax) / (std::pow(m1, 3) * std::sqrt(lmin))) +
                          log_inv_gamma);
    return finish(f, xi, 0.5 - 1.0 / c, c * std::sqrt(m2 * lmax), gamma, L, a, n);
  }
  if (std::holds_alternative<OrthonormalDesign>(design)) {
    BoundReport out = rate_bound(2.0 * p * std::log(2.0 * p / gamma), gamma, 1.0, a, L, n);
    out.components = {{"xi", 1.0}, {"f", 2.0 * p * std::log(2.0 * p / gamma)},
                      {"m_required", 2.0 * p * std::log(2.0 * p / gamma)}, {"L", L}};
    return out;
  }
  throw UnsupportedFamilyError("no closed-form bound for the " + family_name(design) +
                               " design");
}

BoundReport general_moment_bound(Index p, double lambda_min, double fourth_moment, Index n,
                                 double gamma, double L, double a) {
  require_positive(lambda_min, "lambda_min");
  require_positive(fourth_moment, "C");
  require_positive(gamma, "gamma");
  if (p < 1) throw InvalidInputError("p must be >= 1");
  const double pd = static_cast<double>(p);
  const double C = fourth_moment;
  const double c = 16.0 * C / (lambda_min * lambda_min);
  const double xi = std::sqrt(lambda_min) / (2.0 * std::sqrt(2.0));
  const double f = c * (pd * std::log1p(64.0 * std::sqrt(2.0) * std::pow(C, 1.25) /
                                        std::pow(lambda_min, 2.5) * std::sqrt(pd)) +
                        std::log(1.0 / gamma));
  return finish(f, xi, 0.5 - 1.0 / c, c * std::sqrt(pd * std::sqrt(C)), gamma, L, a, n);
}

double minimax_risk_orthonormal(double a, Index p, Index n) {
  require_positive(a, "a");
  if (p < 1 || n < 1) throw InvalidInputError("p and n must be >= 1");
  const double r = a * static_cast<double>(p) / static_cast<double>(n);
  return r * r / 16.0;
}

MinimaxEstimate minimax_risk_mc(const DesignSpec& design, Index n, double a, Index samples,
                                std::uint64_t seed, const Matrix& rotation) {
  require_positive(a, "a");
  if (n < 1 || samples < 1) throw InvalidInputError("n and samples must be >= 1");
  const Index p = dimension(design);
  const Matrix R = rotation.size() == 0 ? Matrix(Matrix::Identity(p, p)) : rotation;
  if (R.rows() != p || R.cols() != p) throw DimensionError("rotation must be p x p");
  if ((R.transpose() * R - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidInputError("rotation must be orthogonal");
  }
  constexpr Index kChunk = 1 << 16;
  Vector sum = Vector::Zero(p);
  Vector sum_sq = Vector::Zero(p);
  Index chunk_id = 0;
  for (Index done = 0; done < samples; done += kChunk, ++chunk_id) {
    const Index b = std::min(kChunk, samples - done);
    const Matrix Z =
        (sample_design(design, b, rng::derive_seed(seed, {static_cast<std::uint64_t>(chunk_id)})) *
         R).cwiseAbs();
    sum += Z.colwise().sum().transpose();
    sum_sq += Z.colwise().squaredNorm().transpose();
  }
  const double N = static_cast<double>(samples);
  Index j = 0;
  const double mean = sum.maxCoeff(&j) / N;
  MinimaxEstimate out;
  out.max_abs_moment = mean;
  out.std_error = std::sqrt(std::max(0.0, sum_sq(j) / N - mean * mean) / N);
  const double denom = static_cast<double>(n) * mean;
  out.value = a * a * static_cast<double>(p) / (16.0 * denom * denom);
  return out;
}

double modded_lower_bound(double a, double inf_abs_moment) {
  require_positive(a, "a");
  require_positive(inf_abs_moment, "inf_abs_moment");
  return a * a / (16.0 * inf_abs_moment * inf_abs_moment);
}

double constrained_ls_bound(Index p, Index n, double sigma_inv_opnorm, double C) {
  if (p < 0 || n < 1) throw InvalidInputError("need p >= 0 and n >= 1");
  require_positive(sigma_inv_opnorm, "sigma_inv_opnorm");
  require_positive(C, "C");
  return C * std::sqrt(static_cast<double>(p) / static_cast<double>(n)) * sigma_inv_opnorm;
}

double cheb_lasso_bound(double a, double lambda, Index n, double alpha_exp, Index s,
                        double kappa, double L) {
  if (!(a >= 0.0)) throw InvalidInputError("a must be >= 0");
  require_positive(lambda, "lambda");
  require_positive(kappa, "kappa");
  require_positive(L, "L");
  if (!(alpha_exp > 0.0 && alpha_exp < 1.0)) throw InvalidInputError("alpha must be in (0, 1)");
  if (n < 2 || s < 1) throw InvalidInputError("need n >= 2 and s >= 1");
  const double scale = std::pow(static_cast<double>(n), 1.0 - alpha_exp);
  const double first = 6.0 * (L + 1.0) * a / (lambda * scale);
  const double second = 24.0 * (L + 1.0) * a * std::sqrt(static_cast<double>(s)) *
                        std::log(static_cast<double>(n)) / (kappa * scale);
  return std::max(first, second);
}

RECheck check_re_empirical(const Matrix& gram, const REParams& re, Index samples_per_subset,
                           std::uint64_t seed) {
  const Index p = gram.rows();
  if (gram.cols() != p || p < 1) throw DimensionError("gram matrix must be square");
  if (p > 16) throw InvalidInputError("subset enumeration supports p <= 16");
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + gram.cwiseAbs().maxCoeff())) {
    throw InvalidInputError("gram matrix must be symmetric");
  }
  require_positive(re.kappa, "kappa");
  if (!(re.gamma_cone >= 1.0)) throw InvalidInputError("gamma must be >= 1");
  if (re.s < 1 || re.s > p) throw InvalidInputError("need 1 <= s <= p");
  if (samples_per_subset < 1) throw InvalidInputError("samples_per_subset must be >= 1");

  RECheck out;
  out.min_ratio = infinity<double>();
  // Subsets as bitmasks with exactly s bits, in increasing order.
  std::uint64_t subset_id = 0;
  for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
    if (std::popcount(mask) != re.s) continue;
    rng::Stream st(rng::derive_seed(seed, {subset_id++}));
    for (Index k = 0; k < samples_per_subset; ++k) {
      Vector v(p);
      double in_norm = 0.0, out_norm = 0.0;
      for (Index j = 0; j < p; ++j) {
        v(j) = st.normal();
        ((mask >> j) & 1u ? in_norm : out_norm) += std::abs(v(j));
      }
      // Rotate through the cone's axis (v_{S^c} = 0), its boundary and its interior.
      const double t = k % 3 == 0 ? 0.0 : k % 3 == 1 ? 1.0 : st.uniform();
      const double scale = out_norm > 0.0 ? t * re.gamma_cone * in_norm / out_norm : 0.0;
      for (Index j = 0; j < p; ++j)
        if (!((mask >> j) & 1u)) v(j) *= scale;
      const double ratio = v.dot(gram * v) / v.squaredNorm();
      if (ratio < out.min_ratio) {
        out.min_ratio = ratio;
        out.witness = v.normalized();
      }
    }
  }
  out.holds = out.min_ratio >= re.kappa * re.kappa;
  return out;
}

}  // namespace chebfit
