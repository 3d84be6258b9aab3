#pragma once

#include <chebfit/model.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <variant>

namespace chebfit {

// Design families. Each row of a sampled design is an independent draw.

struct GaussianDesign {
  Matrix sigma;  // p x p, symmetric positive definite
};

struct RademacherDesign {
  Index p = 0;
};

/// Uniform on the unit sphere S^{p-1}.
struct SphereDesign {
  Index p = 0;
};

/// X = R * A * U with U uniform on the sphere and R drawn independently by
/// inverse-CDF sampling from `radial_quantile`.
struct EllipticalDesign {
  std::function<double(double)> radial_quantile;
  Matrix A;
};

/// Rows drawn uniformly from {sqrt(p) v_1, ..., sqrt(p) v_p}, with v_j the
/// columns of an orthonormal basis. No random signs are applied.
struct OrthonormalDesign {
  Matrix basis;
};

/// i.i.d. standard Cauchy entries.
struct CauchyDesign {
  Index p = 0;
};

using DesignSpec = std::variant<GaussianDesign, RademacherDesign, SphereDesign,
                                EllipticalDesign, OrthonormalDesign, CauchyDesign>;

Index dimension(const DesignSpec& spec);
std::string family_name(const DesignSpec& spec);
/// Throws InvalidInputError for non-SPD sigma, non-orthonormal basis, etc.
void validate(const DesignSpec& spec);

Matrix sample_design(const DesignSpec& spec, Index n, std::uint64_t seed);

// Noise laws.

struct UniformNoise {
  double a = 1.0;
};

/// Continuous symmetric law on [-a, a] given by its cdf. When `quantile` is
/// empty, draws invert the cdf by bisection.
struct SymmetricBoundedNoise {
  double a = 1.0;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
};

using NoiseSpec = std::variant<UniformNoise, SymmetricBoundedNoise>;

double noise_radius(const NoiseSpec& spec);
/// Checks a > 0, cdf(-a) = 0, cdf(a) = 1 and monotonicity on a grid.
void validate(const NoiseSpec& spec);

Vector sample_noise(const NoiseSpec& spec, Index n, std::uint64_t seed);

// Coefficient patterns.

/// First p/2 entries +1, the rest -1.
struct HalfOnes {};

/// First s/2 entries +1, next s/2 entries -1, the rest 0.
struct SparseSigned {
  Index s = 0;
};

using BetaPattern = std::variant<HalfOnes, SparseSigned>;

Vector make_beta(const BetaPattern& pattern, Index p);

/// Truth-bearing dataset y = X beta* + eps. Design and noise use separate
/// streams derived from `seed`.
Dataset make_dataset(const DesignSpec& design, const BetaPattern& pattern,
                     const NoiseSpec& noise, Index n, std::uint64_t seed);

}  // namespace chebfit
