#include <chebfit/designs.hpp>

#include <chebfit/random.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace chebfit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_square(const Matrix& M, const char* what) {
  if (M.rows() < 1 || M.rows() != M.cols()) {
    throw InvalidInputError(std::string(what) + " must be a nonempty square matrix");
  }
  if (!all_finite(M)) throw InvalidInputError(std::string(what) + " has non-finite entries");
}

Vector unit_sphere_draw(rng::Stream& s, Index p) {
  Vector u(p);
  double norm2 = 0.0;
  do {
    for (Index j = 0; j < p; ++j) u(j) = s.normal();
    norm2 = u.squaredNorm();
  } while (norm2 == 0.0);
  return u / std::sqrt(norm2);
}

double invert_cdf(const std::function<double(double)>& cdf, double a, double u) {
  double lo = -a, hi = a;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Index dimension(const DesignSpec& spec) {
  return std::visit(
      overloaded{
          [](const GaussianDesign& d) { return d.sigma.rows(); },
          [](const RademacherDesign& d) { return d.p; },
          [](const SphereDesign& d) { return d.p; },
          [](const EllipticalDesign& d) { return d.A.rows(); },
          [](const OrthonormalDesign& d) { return d.basis.rows(); },
          [](const CauchyDesign& d) { return d.p; },
      },
      spec);
}

std::string family_name(const DesignSpec& spec) {
  return std::visit(overloaded{
                        [](const GaussianDesign&) { return "gaussian"; },
                        [](const RademacherDesign&) { return "rademacher"; },
                        [](const SphereDesign&) { return "sphere"; },
                        [](const EllipticalDesign&) { return "elliptical"; },
                        [](const OrthonormalDesign&) { return "orthonormal"; },
                        [](const CauchyDesign&) { return "cauchy"; },
                    },
                    spec);
}

void validate(const DesignSpec& spec) {
  std::visit(
      overloaded{
          [](const GaussianDesign& d) {
            require_square(d.sigma, "sigma");
            const double tol = 1e-12 * std::max(1.0, d.sigma.cwiseAbs().maxCoeff());
            if ((d.sigma - d.sigma.transpose()).cwiseAbs().maxCoeff() > tol) {
              throw InvalidInputError("sigma is not symmetric");
            }
            Eigen::LLT<Matrix> llt(d.sigma);
            if (llt.info() != Eigen::Success) {
              throw InvalidInputError("sigma is not positive definite");
            }
          },
          [](const RademacherDesign& d) {
            if (d.p < 1) throw InvalidInputError("rademacher design needs p >= 1");
          },
          [](const SphereDesign& d) {
            if (d.p < 1) throw InvalidInputError("sphere design needs p >= 1");
          },
          [](const EllipticalDesign& d) {
            require_square(d.A, "elliptical shape matrix");
            if (!d.radial_quantile) {
              throw InvalidInputError("elliptical design needs a radial quantile");
            }
          },
          [](const OrthonormalDesign& d) {
            require_square(d.basis, "basis");
            const Index p = d.basis.rows();
            const double err =
                (d.basis.transpose() * d.basis - Matrix::Identity(p, p)).cwiseAbs().maxCoeff();
            if (err > 1e-10) throw InvalidInputError("basis columns are not orthonormal");
          },
          [](const CauchyDesign& d) {
            if (d.p < 1) throw InvalidInputError("cauchy design needs p >= 1");
          },
      },
      spec);
}

Matrix sample_design(const DesignSpec& spec, Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("sample_design: n must be >= 1");
  validate(spec);
  const Index p = dimension(spec);
  rng::Stream s(seed);
  Matrix X(n, p);
  std::visit(
      overloaded{
          [&](const GaussianDesign& d) {
            const Matrix L = Eigen::LLT<Matrix>(d.sigma).matrixL();
            Vector z(p);
            for (Index i = 0; i < n; ++i) {
              for (Index j = 0; j < p; ++j) z(j) = s.normal();
              X.row(i) = (L * z).transpose();
            }
          },
          [&](const RademacherDesign&) {
            for (Index i = 0; i < n; ++i)
              for (Index j = 0; j < p; ++j) X(i, j) = s.rademacher();
          },
          [&](const SphereDesign&) {
            for (Index i = 0; i < n; ++i) X.row(i) = unit_sphere_draw(s, p).transpose();
          },
          [&](const EllipticalDesign& d) {
            for (Index i = 0; i < n; ++i) {
              const double r = d.radial_quantile(s.uniform_open());
              const Vector u = unit_sphere_draw(s, p);
              X.row(i) = (r * (d.A * u)).transpose();
            }
          },
          [&](const OrthonormalDesign& d) {
            const double scale = std::sqrt(static_cast<double>(p));
            for (Index i = 0; i < n; ++i) {
              const auto k = static_cast<Index>(s.below(static_cast<std::uint64_t>(p)));
              X.row(i) = scale * d.basis.col(k).transpose();
            }
          },
          [&](const CauchyDesign&) {
            for (Index i = 0; i < n; ++i)
              for (Index j = 0; j < p; ++j)
                X(i, j) = std::tan(std::numbers::pi * (s.uniform_open() - 0.5));
          },
      },
      spec);
  return X;
}

double noise_radius(const NoiseSpec& spec) {
  return std::visit([](const auto& law) { return law.a; }, spec);
}

void validate(const NoiseSpec& spec) {
  const double a = noise_radius(spec);
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw InvalidInputError("noise radius a must be finite and > 0");
  }
  if (const auto* sb = std::get_if<SymmetricBoundedNoise>(&spec)) {
    if (!sb->cdf) throw InvalidInputError("symmetric bounded noise needs a cdf");
    if (std::abs(sb->cdf(-a)) > 1e-12 || std::abs(sb->cdf(a) - 1.0) > 1e-12) {
      throw InvalidInputError("noise cdf must equal 0 at -a and 1 at a");
    }
    double prev = 0.0;
    constexpr int kGrid = 1000;
    for (int k = 0; k <= kGrid; ++k) {
      const double t = -a + 2.0 * a * k / kGrid;
      const double f = sb->cdf(t);
      if (!std::isfinite(f) || f < prev - 1e-15) {
        throw InvalidInputError("noise cdf is not nondecreasing");
      }
      prev = f;
    }
  }
}

Vector sample_noise(const NoiseSpec& spec, Index n, std::uint64_t seed) {
  if (n < 1) throw InvalidInputError("sample_noise: n must be >= 1");
  validate(spec);
  rng::Stream s(seed);
  Vector eps(n);
  std::visit(overloaded{
                 [&](const UniformNoise& u) {
                   for (Index i = 0; i < n; ++i) eps(i) = u.a * (2.0 * s.uniform() - 1.0);
                 },
                 [&](const SymmetricBoundedNoise& b) {
                   for (Index i = 0; i < n; ++i) {
                     const double u = s.uniform();
                     const double e = b.quantile ? b.quantile(u) : invert_cdf(b.cdf, b.a, u);
                     eps(i) = std::clamp(e, -b.a, b.a);
                   }
                 },
             },
             spec);
  return eps;
}

Vector make_beta(const BetaPattern& pattern, Index p) {
  if (p < 1) throw InvalidInputError("make_beta: p must be >= 1");
  Vector beta = Vector::Zero(p);
  std::visit(overloaded{
                 [&](const HalfOnes&) {
                   if (p % 2 != 0) throw InvalidInputError("half-ones pattern needs even p");
                   beta.head(p / 2).setOnes();
                   beta.tail(p / 2).setConstant(-1.0);
                 },
                 [&](const SparseSigned& sp) {
                   if (sp.s < 0 || sp.s % 2 != 0 || sp.s > p) {
                     throw InvalidInputError("sparse pattern needs even s with 0 <= s <= p");
                   }
                   beta.head(sp.s / 2).setOnes();
                   beta.segment(sp.s / 2, sp.s / 2).setConstant(-1.0);
                 },
             },
             pattern);
  return beta;
}

Dataset make_dataset(const DesignSpec& design, const BetaPattern& pattern,
                     const NoiseSpec& noise, Index n, std::uint64_t seed) {
  Matrix X = sample_design(design, n, rng::derive_seed(seed, {rng::fnv1a("design")}));
  Truth truth;
  truth.beta_star = make_beta(pattern, X.cols());
  truth.a = noise_radius(noise);
  truth.eps = sample_noise(noise, n, rng::derive_seed(seed, {rng::fnv1a("noise")}));
  Vector y = X * truth.beta_star + truth.eps;
  return Dataset(std::move(X), std::move(y), std::move(truth));
}

}  // namespace chebfit
