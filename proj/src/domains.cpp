#include "qhgeo/domains.hpp"

#include <algorithm>
#include <limits>

namespace qhgeo {

namespace {

void check_dim(const Vector& v, int dim, const char* what) {
  if (v.size() != dim)
    throw InputError(std::string("domains: ") + what + " has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(dim));
}

}  // namespace

DomainSpec::DomainSpec(NormSpec norm, DomainShape shape) : norm_(std::move(norm)), shape_(std::move(shape)) {
  const int dim = norm_.dimension();
  auto add_face = [&](const HalfSpace& h) {
    check_dim(h.f, dim, "half-space functional");
    require(h.f.cwiseAbs().maxCoeff() > 0.0, "domains: half-space functional must be nonzero");
    try {
      const DualNorm d = dual_evaluate(norm_, h.f);
      face_duals_.emplace_back(d.value);
      approximate_dual_ = approximate_dual_ || d.approximate;
    } catch (const UnsupportedError&) {
      face_duals_.emplace_back(std::nullopt);
    }
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
          add_face(s);
        } else if constexpr (std::is_same_v<T, Ball>) {
          check_dim(s.center, dim, "ball center");
          require(s.radius > 0.0, "domains: ball radius must be positive");
        } else if constexpr (std::is_same_v<T, Punctured>) {
          check_dim(s.point, dim, "puncture point");
        } else {
          require(!s.faces.empty(), "domains: polytope needs at least one face");
          for (const auto& f : s.faces) add_face(f);
        }
      },
      shape_);
}

DomainSpec DomainSpec::half_space(NormSpec norm, Vector f, double c) {
  return DomainSpec(std::move(norm), HalfSpace{std::move(f), c});
}
DomainSpec DomainSpec::ball(NormSpec norm, Vector center, double radius) {
  return DomainSpec(std::move(norm), Ball{std::move(center), radius});
}
DomainSpec DomainSpec::punctured(NormSpec norm, Vector point) {
  return DomainSpec(std::move(norm), Punctured{std::move(point)});
}
DomainSpec DomainSpec::polytope(NormSpec norm, std::vector<HalfSpace> faces) {
  return DomainSpec(std::move(norm), PolytopeIntersection{std::move(faces)});
}

std::string DomainSpec::kind_name() const {
  switch (shape_.index()) {
    case 0: return "halfspace";
    case 1: return "ball";
    case 2: return "punctured";
    default: return "polytope";
  }
}

double DomainSpec::signed_distance(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dimension())
    throw InputError("domains: point of length " + std::to_string(x.size()) + " in a domain of dimension " +
                     std::to_string(dimension()));
  auto face = [&](const HalfSpace& h, std::size_t i) {
    if (!face_duals_[i])
      throw UnsupportedError("domains::boundary_distance: dual norm unsupported for " + norm_.describe());
    return (h.f.dot(x) - h.c) / *face_duals_[i];
  };
  switch (shape_.index()) {
    case 0:
      return face(std::get<HalfSpace>(shape_), 0);
    case 1: {
      const auto& b = std::get<Ball>(shape_);
      return b.radius - evaluate(norm_, x - b.center);
    }
    case 2:
      return evaluate(norm_, x - std::get<Punctured>(shape_).point);
    default: {
      const auto& faces = std::get<PolytopeIntersection>(shape_).faces;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < faces.size(); ++i) d = std::min(d, face(faces[i], i));
      return d;
    }
  }
}

double DomainSpec::interior_tolerance(const Eigen::Ref<const Vector>& x) const {
  return 1e-9 * std::max(1.0, evaluate(norm_, x));
}

bool DomainSpec::contains(const Eigen::Ref<const Vector>& x) const {
  return signed_distance(x) >= interior_tolerance(x);
}

double boundary_distance(const DomainSpec& domain, const Eigen::Ref<const Vector>& x) {
  const double d = domain.signed_distance(x);
  if (!(d >= domain.interior_tolerance(x)))
    throw ExteriorPointError("domains::boundary_distance: point is on or outside the boundary (distance " +
                             std::to_string(d) + ")");
  return d;
}

double qh_weight(const DomainSpec& domain, const Eigen::Ref<const Vector>& x) {
  return 1.0 / boundary_distance(domain, x);
}

namespace {

bool certify_segment(const DomainSpec& domain, const Vector& a, const Vector& b, int depth) {
  const Vector mid = 0.5 * (a + b);
  const double dm = domain.signed_distance(mid);
  const double tol = domain.interior_tolerance(mid);
  if (dm < tol) return false;
  const double half = 0.5 * evaluate(domain.norm(), b - a);
  if (dm - half >= tol) return true;
  if (depth >= 48) return false;
  return certify_segment(domain, a, mid, depth + 1) && certify_segment(domain, mid, b, depth + 1);
}

}  // namespace

bool segment_is_interior(const DomainSpec& domain, const Eigen::Ref<const Vector>& a,
                         const Eigen::Ref<const Vector>& b) {
  if (!domain.contains(a) || !domain.contains(b)) return false;
  if (domain.is_convex()) return true;
  return certify_segment(domain, a, b, 0);
}

}  // namespace qhgeo
