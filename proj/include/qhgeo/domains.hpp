#pragma once

#include "qhgeo/norms.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qhgeo {

/// { x : f.x > c }
struct HalfSpace {
  Vector f;
  double c = 0.0;
};

/// { x : ||x - center|| < radius }
struct Ball {
  Vector center;
  double radius = 1.0;
};

/// X \ { point }
struct Punctured {
  Vector point;
};

/// Intersection of half-spaces. The min-over-faces distance formula used
/// below is valid for intersections only, not unions.
struct PolytopeIntersection {
  std::vector<HalfSpace> faces;
};

using DomainShape = std::variant<HalfSpace, Ball, Punctured, PolytopeIntersection>;

// An open domain given by its boundary-distance oracle under a norm.
class DomainSpec {
 public:
  DomainSpec(NormSpec norm, DomainShape shape);

  static DomainSpec half_space(NormSpec norm, Vector f, double c);
  static DomainSpec ball(NormSpec norm, Vector center, double radius);
  static DomainSpec punctured(NormSpec norm, Vector point);
  static DomainSpec polytope(NormSpec norm, std::vector<HalfSpace> faces);

  const NormSpec& norm() const { return norm_; }
  const DomainShape& shape() const { return shape_; }
  int dimension() const { return norm_.dimension(); }
  bool is_convex() const { return !std::holds_alternative<Punctured>(shape_); }
  /// True when a face distance relies on an approximate (upper-estimate) dual.
  bool distance_is_estimate() const { return approximate_dual_; }
  std::string kind_name() const;

  /// Distance to the boundary with sign: positive inside, <= 0 on or outside.
  /// Never throws for dimension-correct input, except UnsupportedError when
  /// a face needs a dual norm the norm kind does not provide.
  double signed_distance(const Eigen::Ref<const Vector>& x) const;

  /// Points closer to the boundary than this are treated as exterior.
  double interior_tolerance(const Eigen::Ref<const Vector>& x) const;
  bool contains(const Eigen::Ref<const Vector>& x) const;

 private:
  NormSpec norm_;
  DomainShape shape_;
  std::vector<std::optional<double>> face_duals_;
  bool approximate_dual_ = false;
};

/// dist(x, boundary). Throws ExteriorPointError for points on or outside the
/// boundary (within the interiority tolerance).
double boundary_distance(const DomainSpec& domain, const Eigen::Ref<const Vector>& x);

/// Quasihyperbolic weight 1 / dist(x, boundary).
double qh_weight(const DomainSpec& domain, const Eigen::Ref<const Vector>& x);

/// True when every point of the closed segment [a, b] is interior. Convex
/// domains check the endpoints only (the distance is concave there); other
/// domains use a recursive 1-Lipschitz certificate.
bool segment_is_interior(const DomainSpec& domain, const Eigen::Ref<const Vector>& a,
                         const Eigen::Ref<const Vector>& b);

}  // namespace qhgeo
