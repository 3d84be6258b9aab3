#pragma once

#include <chebfit/designs.hpp>

#include <cstdint>
#include <optional>

namespace chebfit {

// Point clouds are matrices whose rows are the points.

enum class Containment { Certified, Refuted, Approximate };

const char* to_string(Containment c);

/// Verdict on whether the centered ball of radius xi lies in the hull.
struct ContainmentVerdict {
  Containment contained = Containment::Approximate;
  // Unit direction with support below xi (present when Refuted).
  std::optional<Vector> witness;
  // Smallest support value found; the exact inradius in the 2-d case.
  double inradius_estimate = 0.0;
  // Number of directions examined by the sampled test.
  Index directions = 0;
};

/// max_i <v, x_i>. `v` must have unit norm.
double support_function(const Matrix& cloud, const Vector& v);

/// Exact test in the plane through the convex hull (monotone chain). The
/// inradius estimate is min over unit v of the support function, which is
/// negative when the origin lies outside the hull. Collinear clouds are
/// refuted with inradius 0.
ContainmentVerdict ball_in_hull_2d(const Matrix& cloud, double xi);

/// Direction sampling plus projected subgradient refinement from the worst
/// sampled directions. Refuted is always correct; otherwise the verdict is
/// Approximate. `directions` = 0 selects 20000 * p.
ContainmentVerdict ball_in_hull_sampled(const Matrix& cloud, double xi, Index directions,
                                        std::uint64_t seed);

struct ProbabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;  // binomial
  Index trials = 0;
  Index hits = 0;
  // False when the sampled test was used, so `value` may undercount.
  bool exact = true;
};

/// Frequency with which xi*B is NOT inside conv(eta_1 X_1, ..., eta_m X_m),
/// with X_i drawn from `design` and independent Rademacher eta_i.
ProbabilityEstimate estimate_containment_probability(const DesignSpec& design, Index m,
                                                     double xi, Index trials,
                                                     std::uint64_t seed, Index directions = 0,
                                                     int jobs = 1);

}  // namespace chebfit
