#pragma once

#include "qhgeo/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qhgeo {

/// A polyline together with an increasing parameter in [0, 1] per vertex;
/// the path is linear in the parameter between vertices.
struct ParameterizedPath {
  Polyline path;
  std::vector<double> params;
};

/// Parameter = norm arclength / total length.
ParameterizedPath arclength_parameterized(const Polyline& path, const NormSpec& norm);

/// Point at parameter t in [0, 1].
Vector point_at(const ParameterizedPath& path, double t);

/// Norm length of the sub-path over parameters [a, b].
double subpath_length(const ParameterizedPath& path, const NormSpec& norm, double a, double b);

/// Tents for endpoints x, y: alpha_m(t) = min(x_m, y_m) + delta * min(t, 1 - t)
/// with delta = |x - y|_inf = |x_n - y_n| for the distinguished coordinate n.
/// Each piece has slope of absolute value delta.
struct TentSpec {
  Vector x;
  Vector y;
  double delta = 0.0;
  Eigen::Index distinguished = 0;

  double operator()(Eigen::Index m, double t) const;
};

TentSpec make_tents(const Vector& x, const Vector& y);

/// gamma_k: coordinates m < k replaced by max(gamma_m, alpha_m), the rest
/// unchanged. `domain` must be a sup-norm half-space; coordinates where f
/// is negative are sign-flipped (with f, endpoints and path) before the max
/// and flipped back after, so f may have any signs. The path is taken with
/// its norm-arclength parameter on [0, 1]; output vertices include t = 1/2
/// and every crossing of gamma_m and alpha_m.
ParameterizedPath apply_shortening(const DomainSpec& domain, const Polyline& path, int k);

struct NormCheck {
  bool ok = true;
  /// max over windows of length(modified, a, b) - length(original, a, b).
  double max_violation = 0.0;
};

/// Sub-path norm-length comparison over `windows` random [a, b] in [0, 1];
/// ok iff no violation exceeds 1e-9.
NormCheck verify_norm_nonincrease(const ParameterizedPath& original, const ParameterizedPath& modified,
                                  const NormSpec& norm, int windows = 100, std::uint64_t seed = 0);

struct ShorteningReport {
  int k = 0;
  /// qh length of gamma_j for j = 0..k.
  std::vector<double> qh_lengths;
  /// <f, gamma_j(1/2)> for j = 0..k.
  std::vector<double> weights_at_half;
  /// Parameter measure where coordinate 0 of the path lies strictly below its tent.
  double below_tent_measure = 0.0;
  bool lengths_nonincreasing = true;
  bool weights_nondecreasing = true;
};

/// Runs apply_shortening for j = 0..k; monotonicity uses tolerance 1e-8.
ShorteningReport shortening_report(const DomainSpec& domain, const Polyline& path, int k);

struct AveragingMargin {
  /// s * l(p2) + (1 - s) * l(p1) - l(gamma_s).
  double margin = 0.0;
  double separation = 0.0;
  double length_p1 = 0.0;
  double length_p2 = 0.0;
  double length_average = 0.0;
};

/// Paths must share endpoints and vertex count (QH-proportional alignment
/// via resample_qh_proportional); otherwise InputError.
AveragingMargin averaging_strictness(const DomainSpec& domain, const Polyline& p1, const Polyline& p2, double s);

struct TieCertificate {
  double straight_length = 0.0;
  double tent_length = 0.0;
  std::vector<double> start_lengths;
  double min_start_length = 0.0;
  bool pass = false;
};

/// Sup-norm upper half-plane: (0,1)->(0,2) straight and through (1/2, 3/2)
/// must both have length log 2 within 1e-8, and no solver start may end
/// below log 2 - 1e-6.
TieCertificate halfplane_tie_certificate(const SolverConfig& config = {}, int starts = 32, unsigned threads = 1);

/// Random pair near a geodesic in a convex 2-norm domain: a closed-form
/// geodesic (half-plane circle arc or ball diameter) plus two sine
/// perturbations, QH-proportionally resampled to `vertices`.
struct AlignedPair {
  DomainSpec domain;
  Polyline p1;
  Polyline p2;
};
AlignedPair random_aligned_pair(std::mt19937_64& rng, int vertices = 41);

struct SuiteResult {
  std::string suite;
  int instances = 0;
  bool pass = false;
  /// Smallest slack against the suite's criterion (negative = failure).
  double worst_margin = 0.0;
};

/// tie, shortening, subpath, averaging, jensen, average_norm.
const std::vector<std::string>& suite_names();

SuiteResult run_suite(const std::string& name, std::uint64_t seed = 0, unsigned threads = 1);

}  // namespace qhgeo
