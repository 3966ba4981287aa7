#include "qhgeo/qh_ball.hpp"

#include "qhgeo/parallel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace qhgeo {

namespace {

constexpr double kBandTol = 1e-3;

struct RayOutcome {
  Vector point;
  double dist = 0.0;
  RayStatus status = RayStatus::Failed;
};

RayOutcome trace_ray(const DomainSpec& domain, const Vector& center, const Vector& u, double radius,
                     const SolverConfig& config) {
  const double dc = boundary_distance(domain, center);
  auto at = [&](double t) -> Vector { return center + t * u; };
  auto qh = [&](double t) { return solve_geodesic(domain, center, at(t), config).qh_length; };

  // k(center, p) >= log(1 + |p - center| / d(center)), so the band lies
  // no farther than t_far along any ray.
  double t_hi = dc * std::expm1(radius);
  if (!segment_is_interior(domain, center, at(t_hi))) {
    double lo = 0.0, hi = t_hi;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (segment_is_interior(domain, center, at(mid)) ? lo : hi) = mid;
    }
    t_hi = lo * (1.0 - 1e-9);
    while (t_hi > 0.0 && !(boundary_distance(domain, at(t_hi)) > domain.interior_tolerance(at(t_hi)) * 10.0))
      t_hi *= 1.0 - 1e-6;
  }

  RayOutcome out;
  double g_hi = qh(t_hi) - radius;
  if (g_hi < -kBandTol) {
    out.point = at(t_hi);
    out.dist = g_hi + radius;
    out.status = RayStatus::Truncated;
    return out;
  }
  double t_lo = 0.0, g_lo = -radius;
  double t = t_hi, g = g_hi;
  int side = 0;
  for (int it = 0; it < 100 && std::abs(g) > kBandTol; ++it) {
    // Illinois false position.
    t = (t_lo * g_hi - t_hi * g_lo) / (g_hi - g_lo);
    if (!(t > t_lo && t < t_hi)) t = 0.5 * (t_lo + t_hi);
    g = qh(t) - radius;
    if (g > 0.0) {
      t_hi = t;
      g_hi = g;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    } else {
      t_lo = t;
      g_lo = g;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    }
  }
  if (std::abs(g) > kBandTol) throw NonConvergenceError("sample_qh_ball: band search did not converge");
  out.point = at(t);
  out.dist = g + radius;
  out.status = RayStatus::Ok;
  return out;
}

}  // namespace

std::string to_string(RayStatus status) {
  switch (status) {
    case RayStatus::Ok:
      return "ok";
    case RayStatus::Truncated:
      return "truncated";
    case RayStatus::Failed:
      return "failed";
  }
  return "failed";
}

QHBallSample sample_qh_ball(const DomainSpec& domain, const Vector& center, double radius, int directions,
                            const SolverConfig& config, unsigned threads) {
  require(std::isfinite(radius) && radius > 0.0, "sample_qh_ball: radius must be positive");
  require(directions >= 1, "sample_qh_ball: directions must be positive");
  require(center.size() == domain.dimension(), "sample_qh_ball: center dimension does not match the domain");
  boundary_distance(domain, center);

  const Eigen::Index dim = center.size();
  QHBallSample sample;
  sample.center = center;
  sample.radius = radius;
  sample.directions.resize(dim, directions);
  sample.points.resize(dim, directions);
  sample.qh_dist.assign(directions, 0.0);
  sample.status.assign(directions, RayStatus::Failed);

  for (int i = 0; i < directions; ++i) {
    Vector u(dim);
    if (dim == 2) {
      const double a = 2.0 * std::numbers::pi * i / directions;
      u << std::cos(a), std::sin(a);
    } else {
      auto rng = make_rng(config.seed, static_cast<std::uint64_t>(i));
      std::normal_distribution<double> gauss(0.0, 1.0);
      do {
        for (Eigen::Index k = 0; k < dim; ++k) u[k] = gauss(rng);
      } while (!(u.norm() > 1e-12));
    }
    sample.directions.col(i) = u / evaluate(domain.norm(), u);
  }

  parallel_for(static_cast<std::size_t>(directions), threads, [&](std::size_t i) {
    try {
      const auto ray = trace_ray(domain, center, sample.directions.col(i), radius, config);
      sample.points.col(i) = ray.point;
      sample.qh_dist[i] = ray.dist;
      sample.status[i] = ray.status;
    } catch (const Error&) {
      sample.points.col(i) = center;
      sample.qh_dist[i] = std::numeric_limits<double>::quiet_NaN();
      sample.status[i] = RayStatus::Failed;
    }
  });
  return sample;
}

BallConvexityReport check_ball_convexity(const DomainSpec& domain, const QHBallSample& sample, int pairs,
                                         const SolverConfig& config, unsigned threads) {
  std::vector<Eigen::Index> ok;
  for (std::size_t i = 0; i < sample.status.size(); ++i)
    if (sample.status[i] == RayStatus::Ok) ok.push_back(static_cast<Eigen::Index>(i));
  require(ok.size() >= 2, "check_ball_convexity: fewer than two usable band points");
  require(pairs >= 1, "check_ball_convexity: pairs must be positive");

  std::vector<double> excess(static_cast<std::size_t>(pairs));
  parallel_for(excess.size(), threads, [&](std::size_t j) {
    auto rng = make_rng(config.seed, 0xba11u + j);
    std::uniform_int_distribution<std::size_t> pick(0, ok.size() - 1);
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (b == a) b = pick(rng);
    const Vector mid = 0.5 * (sample.points.col(ok[a]) + sample.points.col(ok[b]));
    if ((mid - sample.center).lpNorm<Eigen::Infinity>() <= 1e-12) {
      excess[j] = -sample.radius;
      return;
    }
    excess[j] = solve_geodesic(domain, sample.center, mid, config).qh_length - sample.radius;
  });

  BallConvexityReport report;
  report.pairs = pairs;
  for (double e : excess) {
    report.max_excess = std::max(report.max_excess, e);
    report.min_margin = std::min(report.min_margin, -e);
  }
  return report;
}

void write_ball_csv(std::ostream& os, const QHBallSample& sample) {
  os << "direction_index";
  for (Eigen::Index k = 0; k < sample.points.rows(); ++k) os << ",x" << k;
  os << ",qh_dist,status\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < sample.points.cols(); ++i) {
    os << i;
    for (Eigen::Index k = 0; k < sample.points.rows(); ++k) os << ',' << sample.points(k, i);
    os << ',' << sample.qh_dist[i] << ',' << to_string(sample.status[i]) << '\n';
  }
}

}  // namespace qhgeo
