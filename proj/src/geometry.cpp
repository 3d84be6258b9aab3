#include <chebfit/geometry.hpp>
#include <chebfit/parallel.hpp>
#include <chebfit/random.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace chebfit {

namespace {

using Point = std::array<double, 2>;

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Counter-clockwise hull without collinear points.
std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double tolerance(const Matrix& cloud) {
  return 1e-12 * std::max(1.0, cloud.cwiseAbs().maxCoeff());
}

void check_cloud(const Matrix& cloud) {
  if (cloud.rows() == 0 || cloud.cols() == 0) throw DimensionError("empty point cloud");
  if (!all_finite(cloud)) throw InvalidInputError("point cloud has non-finite entries");
}

Vector unit2(double x, double y) {
  const double r = std::hypot(x, y);
  return r > 0.0 ? Vector{{x / r, y / r}} : Vector{{1.0, 0.0}};
}

ContainmentVerdict finish(const Matrix& cloud, double xi, double inradius, Vector witness,
                          Containment pass) {
  ContainmentVerdict out;
  out.inradius_estimate = inradius;
  if (inradius >= xi - tolerance(cloud)) {
    out.contained = pass;
  } else {
    out.contained = Containment::Refuted;
    out.witness = std::move(witness);
  }
  return out;
}

}  // namespace

const char* to_string(Containment c) {
  switch (c) {
    case Containment::Certified: return "certified";
    case Containment::Refuted: return "refuted";
    case Containment::Approximate: return "approximate";
  }
  return "unknown";
}

double support_function(const Matrix& cloud, const Vector& v) {
  check_cloud(cloud);
  if (v.size() != cloud.cols()) throw DimensionError("direction dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw InvalidInputError("direction must be a unit vector");
  return (cloud * v).maxCoeff();
}

ContainmentVerdict ball_in_hull_2d(const Matrix& cloud, double xi) {
  check_cloud(cloud);
  if (cloud.cols() != 2) throw DimensionError("ball_in_hull_2d needs p = 2");
  if (cloud.rows() < 3) throw InvalidInputError("ball_in_hull_2d needs at least 3 points");
  std::vector<Point> pts(static_cast<std::size_t>(cloud.rows()));
  for (Index i = 0; i < cloud.rows(); ++i) pts[static_cast<std::size_t>(i)] = {cloud(i, 0), cloud(i, 1)};
  const std::vector<Point> hull = convex_hull(std::move(pts));

  if (hull.size() < 3) {
    // Every point has the same projection on the normal of the common line.
    Vector v = hull.size() == 1 ? unit2(-hull[0][0], -hull[0][1])
                                : unit2(hull[0][1] - hull[1][1], hull[1][0] - hull[0][0]);
    if (v.dot(Vector{{hull[0][0], hull[0][1]}}) > 0.0) v = -v;
    ContainmentVerdict out;
    out.contained = Containment::Refuted;
    out.witness = std::move(v);
    out.inradius_estimate = 0.0;
    return out;
  }

  // Support in the outward normal of each edge is the edge's offset.
  double best = infinity<double>();
  Vector best_normal;
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Point& a = hull[e];
    const Point& b = hull[(e + 1) % hull.size()];
    const Vector n = unit2(b[1] - a[1], a[0] - b[0]);
    const double h = n(0) * a[0] + n(1) * a[1];
    if (h < best) {
      best = h;
      best_normal = n;
    }
  }
  if (best >= 0.0) return finish(cloud, xi, best, best_normal, Containment::Certified);

  // Origin outside: min support is minus the distance to the hull.
  double dist = infinity<double>();
  Point nearest{};
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Point& a = hull[e];
    const Point& b = hull[(e + 1) % hull.size()];
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double t = std::clamp(-(a[0] * dx + a[1] * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    const Point q{a[0] + t * dx, a[1] + t * dy};
    const double d = std::hypot(q[0], q[1]);
    if (d < dist) {
      dist = d;
      nearest = q;
    }
  }
  return finish(cloud, xi, -dist, unit2(-nearest[0], -nearest[1]), Containment::Certified);
}

ContainmentVerdict ball_in_hull_sampled(const Matrix& cloud, double xi, Index directions,
                                        std::uint64_t seed) {
  check_cloud(cloud);
  const Index p = cloud.cols();
  if (p < 2) throw DimensionError("ball_in_hull_sampled needs p >= 2");
  if (directions < 0) throw InvalidInputError("direction count must be >= 0");
  const Index total = directions == 0 ? 20000 * p : directions;

  constexpr Index kBlock = 2048;
  constexpr int kStarts = 5;
  constexpr int kSteps = 50;
  rng::Stream stream(seed);
  // Worst directions seen so far, sorted by support.
  std::vector<std::pair<double, Vector>> worst;
  constexpr Index kRowChunk = 256;
  const Index m = cloud.rows();
  Matrix V(p, kBlock);
  Matrix H(std::min(kRowChunk, m), kBlock);
  Eigen::RowVectorXd h(kBlock);
  for (Index done = 0; done < total; done += kBlock) {
    const Index b = std::min(kBlock, total - done);
    for (Index j = 0; j < b; ++j) {
      for (Index k = 0; k < p; ++k) V(k, j) = stream.normal();
      V.col(j).normalize();
    }
    // Row chunks keep the product buffer small for large clouds.
    h.head(b).setConstant(-infinity<double>());
    for (Index r0 = 0; r0 < m; r0 += kRowChunk) {
      const Index rows = std::min(kRowChunk, m - r0);
      H.topLeftCorner(rows, b).noalias() = cloud.middleRows(r0, rows) * V.leftCols(b);
      h.head(b) = h.head(b).cwiseMax(H.topLeftCorner(rows, b).colwise().maxCoeff());
    }
    for (Index j = 0; j < b; ++j) {
      if (worst.size() == kStarts && h(j) >= worst.back().first) continue;
      auto at = std::upper_bound(worst.begin(), worst.end(), h(j),
                                 [](double x, const auto& w) { return x < w.first; });
      worst.insert(at, {h(j), V.col(j)});
      if (worst.size() > kStarts) worst.pop_back();
    }
  }

  double best = worst.front().first;
  Vector best_v = worst.front().second;
  for (const auto& start : worst) {
    Vector v = start.second;
    for (int step = 0; step < kSteps; ++step) {
      Index arg = 0;
      (cloud * v).maxCoeff(&arg);
      const Vector g = cloud.row(arg).transpose();
      const double gn = g.norm();
      if (gn == 0.0) break;
      v -= (0.1 / gn) * g;
      const double vn = v.norm();
      if (vn == 0.0) break;
      v /= vn;
      const double h = (cloud * v).maxCoeff();
      if (h < best) {
        best = h;
        best_v = v;
      }
    }
  }
  ContainmentVerdict out = finish(cloud, xi, best, best_v, Containment::Approximate);
  out.directions = total;
  return out;
}

ProbabilityEstimate estimate_containment_probability(const DesignSpec& design, Index m,
                                                     double xi, Index trials,
                                                     std::uint64_t seed, Index directions,
                                                     int jobs) {
  validate(design);
  const Index p = dimension(design);
  if (trials < 1) throw InvalidInputError("trials must be >= 1");
  if (p < 2) throw DimensionError("containment estimates need p >= 2");
  if (m < (p == 2 ? 3 : 1)) throw InvalidInputError("too few points per trial");
  if (!std::isfinite(xi)) throw InvalidInputError("xi must be finite");

  std::vector<char> refuted(static_cast<std::size_t>(trials), 0);
  parallel_for(refuted.size(), jobs, [&](std::size_t t) {
    const std::uint64_t s = rng::derive_seed(seed, {static_cast<std::uint64_t>(t)});
    Matrix X = sample_design(design, m, rng::derive_seed(s, {rng::fnv1a("design")}));
    rng::Stream eta(rng::derive_seed(s, {rng::fnv1a("eta")}));
    for (Index i = 0; i < m; ++i) X.row(i) *= eta.rademacher();
    const ContainmentVerdict v =
        p == 2 ? ball_in_hull_2d(X, xi)
               : ball_in_hull_sampled(X, xi, directions,
                                      rng::derive_seed(s, {rng::fnv1a("directions")}));
    refuted[t] = v.contained == Containment::Refuted;
  });

  ProbabilityEstimate out;
  out.trials = trials;
  out.hits = std::count(refuted.begin(), refuted.end(), 1);
  out.value = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(trials));
  out.exact = p == 2;
  return out;
}

}  // namespace chebfit
