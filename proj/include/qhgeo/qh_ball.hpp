#pragma once

#include "qhgeo/solver.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace qhgeo {

enum class RayStatus { Ok, Truncated, Failed };

std::string to_string(RayStatus status);

/// Boundary-band samples of the QH ball D(center, radius), one per ray.
struct QHBallSample {
  Vector center;
  double radius = 0.0;
  /// Unit (in the ambient norm) ray directions, one column per ray.
  Matrix directions;
  /// Located band points, one column per ray.
  Matrix points;
  std::vector<double> qh_dist;
  std::vector<RayStatus> status;
};

/// Bisects (with false-position acceleration) along each ray to a point whose
/// solver QH distance from `center` is `radius` within 1e-3. Rays are evenly
/// spaced angles in 2D and seeded random directions otherwise. A ray whose
/// band lies beyond the last interior point is truncated; a solver failure
/// marks only that ray as failed.
QHBallSample sample_qh_ball(const DomainSpec& domain, const Vector& center, double radius, int directions,
                            const SolverConfig& config = {}, unsigned threads = 1);

struct BallConvexityReport {
  int pairs = 0;
  /// max over pairs of k(center, midpoint) - radius.
  double max_excess = -std::numeric_limits<double>::infinity();
  /// min over pairs of radius - k(center, midpoint); logged, not asserted.
  double min_margin = std::numeric_limits<double>::infinity();
};

/// Midpoint test on random pairs of Ok band points.
BallConvexityReport check_ball_convexity(const DomainSpec& domain, const QHBallSample& sample, int pairs,
                                         const SolverConfig& config = {}, unsigned threads = 1);

/// CSV columns: direction_index, x0..x{n-1}, qh_dist, status.
void write_ball_csv(std::ostream& os, const QHBallSample& sample);

}  // namespace qhgeo
