#pragma once

#include "qhgeo/domains.hpp"
#include "qhgeo/quadrature.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace qhgeo {

// A path as an ordered list of at least two vertices, stored column-wise.
// Consecutive vertices must be distinct (sup-distance > 1e-12).
class Polyline {
 public:
  explicit Polyline(Matrix vertices);
  static Polyline from_points(const std::vector<Vector>& points);
  /// Straight segment a -> b subdivided into `pieces` equal parts.
  static Polyline segment(const Vector& a, const Vector& b, int pieces = 1);

  Eigen::Index size() const { return vertices_.cols(); }
  Eigen::Index segment_count() const { return vertices_.cols() - 1; }
  int dimension() const { return static_cast<int>(vertices_.rows()); }
  auto vertex(Eigen::Index i) const { return vertices_.col(i); }
  auto front() const { return vertices_.col(0); }
  auto back() const { return vertices_.col(vertices_.cols() - 1); }
  const Matrix& vertices() const { return vertices_; }

  Polyline reversed() const;

 private:
  Matrix vertices_;
};

/// Joins two paths with p1.back() == p2.front().
Polyline concatenate(const Polyline& p1, const Polyline& p2);

double norm_length(const Polyline& path, const NormSpec& norm);

/// Cumulative norm length at each vertex (first entry 0).
std::vector<double> cumulative_norm_length(const Polyline& path, const NormSpec& norm);

/// Point at norm-arclength s along the path (clamped to [0, length]).
Vector point_at_arclength(const Polyline& path, const NormSpec& norm, double s);

struct QuadratureOptions {
  /// Gauss-Legendre nodes per panel.
  int points_per_segment = 8;
  /// A panel whose two-panel refinement changes it by more than this times
  /// the segment's value is split.
  double rel_tol = 1e-9;
  int max_depth = 20;
};

/// QH length of the segment [a, b] by adaptive composite Gauss-Legendre.
double segment_qh_length(const DomainSpec& domain, const Eigen::Ref<const Vector>& a,
                         const Eigen::Ref<const Vector>& b, const QuadratureOptions& options = {});

/// Per-segment QH lengths of a path.
std::vector<double> segment_qh_lengths(const Polyline& path, const DomainSpec& domain,
                                       const QuadratureOptions& options = {});

/// Quasihyperbolic length: integral of w(gamma) ||gamma'|| with w = 1/d.
/// Throws ExteriorPointError naming the segment when a node (or, in
/// non-convex domains, any segment point) is not interior, and
/// NonConvergenceError when adaptive refinement exceeds max_depth.
double qh_length(const Polyline& path, const DomainSpec& domain, const QuadratureOptions& options = {});

using WeightFunction = std::function<double(const Vector&)>;

/// Length of the path under an arbitrary non-negative weight w:
/// integral of w(gamma) ||gamma'||, with the same adaptive rule as qh_length.
double weighted_length(const Polyline& path, const NormSpec& norm, const WeightFunction& weight,
                       const QuadratureOptions& options = {});

/// Resamples `samples` vertices at equal norm-arclength spacing along the
/// image of `path`.
Polyline reparameterize_arclength(const Polyline& path, const NormSpec& norm, int samples);

/// Resamples so that vertex i sits at QH-length fraction i/(samples-1) of
/// the original path, located by bisection to 1e-6 of the total.
Polyline resample_qh_proportional(const Polyline& path, const DomainSpec& domain, int samples,
                                  const QuadratureOptions& options = {});

/// Vertex-wise (1-s) p1 + s p2.
Polyline average_paths(const Polyline& p1, const Polyline& p2, double s);

/// Largest vertex-wise separation max_i ||p1_i - p2_i||.
double max_vertex_separation(const Polyline& p1, const Polyline& p2, const NormSpec& norm);

/// Distance from a point to a segment in the given norm (exact for the
/// 2-norm, golden-section search along the segment otherwise).
double point_segment_distance(const NormSpec& norm, const Eigen::Ref<const Vector>& p,
                              const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

/// Symmetric Hausdorff distance between the images of two polylines, with
/// each segment sampled at `samples_per_segment` interior points.
double hausdorff_distance(const Polyline& p1, const Polyline& p2, const NormSpec& norm,
                          int samples_per_segment = 4);

/// CSV columns: index, x0..x{n-1}, cum_norm_len, cum_qh_len.
void write_path_csv(std::ostream& os, const Polyline& path, const DomainSpec& domain);

}  // namespace qhgeo
