#pragma once

#include "qhgeo/paths.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qhgeo {

struct SolverConfig {
  /// Vertices of the round-0 polyline, endpoints included.
  int initial_vertices = 9;
  /// Refinement rounds after round 0; each doubles the interior vertices.
  int max_refinements = 5;
  /// Backtracking line search: step shrink factor and Armijo constant.
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  /// Central-difference step, relative to the local boundary distance.
  double fd_step = 1e-6;
  /// Rounds stop once the relative length improvement drops below this.
  double round_tol = 1e-9;
  /// Descent iterations allowed per round.
  int max_iterations = 3000;
  /// Curvature pairs kept by the quasi-Newton direction.
  int history = 8;
  /// Gauss-Legendre nodes per segment in the descent objective.
  int quadrature_points = 8;
  std::uint64_t seed = 0;
  bool record_trace = false;
};

struct StartRecord {
  std::uint64_t seed = 0;
  double length = 0.0;
};

struct GeodesicResult {
  Polyline path;
  double qh_length = 0.0;
  /// lower_bound <= qh_length <= upper_bound (+1e-9).
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool converged = false;
  std::vector<StartRecord> starts;
  /// Descent objective at the end of each round.
  std::vector<double> round_lengths;
  int iterations = 0;
  bool straight_segment_interior = false;
  /// Objective after every accepted step (only with record_trace).
  std::vector<double> trace;
};

/// Classical lower bound k(x,y) >= log(1 + ||x-y|| / min(d(x), d(y))),
/// valid in any normed space because d is 1-Lipschitz. It dominates
/// |log(d(x)/d(y))|.
double qh_lower_bound(const DomainSpec& domain, const Vector& x, const Vector& y);

/// Straight segment when it is interior, otherwise a two-corner detour
/// found by random interior waypoint search (NoPathError after 1000 trials).
Polyline initial_path(const DomainSpec& domain, const Vector& x, const Vector& y, const SolverConfig& config);

/// Path x -> w -> y through a random interior waypoint w, resampled to
/// config.initial_vertices. Used to seed multi-start runs.
Polyline random_detour(const DomainSpec& domain, const Vector& x, const Vector& y, const SolverConfig& config,
                       std::uint64_t stream);

/// Minimizes the QH length over polylines joining x and y: quasi-Newton
/// descent on interior vertices with central finite-difference gradients,
/// Armijo backtracking, a boundary guard, and arclength refinement rounds.
GeodesicResult solve_geodesic(const DomainSpec& domain, const Vector& x, const Vector& y,
                              const SolverConfig& config = {});

/// Same descent, started from a caller-supplied polyline.
GeodesicResult solve_from(const DomainSpec& domain, const Polyline& initial, const SolverConfig& config = {});

struct UniquenessReport {
  std::vector<GeodesicResult> runs;
  double hausdorff_spread = 0.0;
  /// (max - min) / min over final lengths.
  double length_spread = 0.0;
  /// Norm length of the shortest run, the Hausdorff reference scale.
  double reference_norm_length = 0.0;
  bool unique_consistent = false;
  // Verdict thresholds. They are engineering choices, not derived bounds.
  double hausdorff_threshold = 1e-3;
  double length_threshold = 1e-6;
};

/// Runs `starts` solves from randomized detours and compares the results.
/// unique_consistent iff Hausdorff spread < 1e-3 * norm length and length
/// spread < 1e-6 (relative).
UniquenessReport probe_uniqueness(const DomainSpec& domain, const Vector& x, const Vector& y,
                                  const SolverConfig& config, int starts, unsigned threads = 1);

}  // namespace qhgeo
