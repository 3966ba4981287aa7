#include "qhgeo/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace qhgeo {

Polyline::Polyline(Matrix vertices) : vertices_(std::move(vertices)) {
  require(vertices_.cols() >= 2, "Polyline: at least two vertices required");
  require(vertices_.rows() >= 1, "Polyline: vertices must have positive dimension");
  require(vertices_.allFinite(), "Polyline: vertices must be finite");
  for (Eigen::Index i = 0; i + 1 < vertices_.cols(); ++i) {
    if (!((vertices_.col(i + 1) - vertices_.col(i)).lpNorm<Eigen::Infinity>() > 1e-12))
      throw InputError("Polyline: consecutive vertices " + std::to_string(i) + " and " + std::to_string(i + 1) +
                       " coincide");
  }
}

Polyline Polyline::from_points(const std::vector<Vector>& points) {
  require(!points.empty(), "Polyline: no points");
  Matrix m(points.front().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].size() == m.rows(), "Polyline: points of differing dimension");
    m.col(static_cast<Eigen::Index>(i)) = points[i];
  }
  return Polyline(std::move(m));
}

Polyline Polyline::segment(const Vector& a, const Vector& b, int pieces) {
  require(pieces >= 1, "Polyline::segment: pieces must be positive");
  require(a.size() == b.size(), "Polyline::segment: endpoint dimensions differ");
  Matrix m(a.size(), pieces + 1);
  for (int i = 0; i <= pieces; ++i) {
    const double t = static_cast<double>(i) / pieces;
    m.col(i) = (1.0 - t) * a + t * b;
  }
  m.col(0) = a;
  m.col(pieces) = b;
  return Polyline(std::move(m));
}

Polyline Polyline::reversed() const { return Polyline(vertices_.rowwise().reverse()); }

Polyline concatenate(const Polyline& p1, const Polyline& p2) {
  require(p1.dimension() == p2.dimension(), "concatenate: dimension mismatch");
  require((p1.back() - p2.front()).lpNorm<Eigen::Infinity>() <= 1e-12, "concatenate: paths do not meet");
  Matrix m(p1.dimension(), p1.size() + p2.size() - 1);
  m.leftCols(p1.size()) = p1.vertices();
  m.rightCols(p2.size() - 1) = p2.vertices().rightCols(p2.size() - 1);
  return Polyline(std::move(m));
}

double norm_length(const Polyline& path, const NormSpec& norm) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < path.segment_count(); ++i)
    total += evaluate(norm, path.vertex(i + 1) - path.vertex(i));
  return total;
}

std::vector<double> cumulative_norm_length(const Polyline& path, const NormSpec& norm) {
  std::vector<double> cum(static_cast<std::size_t>(path.size()), 0.0);
  for (Eigen::Index i = 0; i < path.segment_count(); ++i)
    cum[i + 1] = cum[i] + evaluate(norm, path.vertex(i + 1) - path.vertex(i));
  return cum;
}

namespace {

Vector locate(const Polyline& path, const std::vector<double>& cum, double s) {
  if (s <= 0.0) return path.front();
  if (s >= cum.back()) return path.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const Eigen::Index j = std::clamp<Eigen::Index>(it - cum.begin() - 1, 0, path.segment_count() - 1);
  const double len = cum[j + 1] - cum[j];
  const double t = len > 0.0 ? (s - cum[j]) / len : 0.0;
  return (1.0 - t) * path.vertex(j) + t * path.vertex(j + 1);
}

// Parameters t in (0, 1) where a piecewise-smooth function of z0 + t v may
// kink: sign changes of the coordinates and crossings of their magnitudes.
void magnitude_breaks(const Vector& z0, const Vector& v, bool crossings, std::vector<double>& out) {
  auto push = [&](double num, double den) {
    if (den == 0.0) return;
    const double t = num / den;
    if (t > 0.0 && t < 1.0) out.push_back(t);
  };
  for (Eigen::Index i = 0; i < z0.size(); ++i) {
    push(-z0[i], v[i]);
    if (!crossings) continue;
    for (Eigen::Index j = i + 1; j < z0.size(); ++j) {
      push(z0[j] - z0[i], v[i] - v[j]);
      push(-z0[j] - z0[i], v[i] + v[j]);
    }
  }
}

void norm_breaks(const NormSpec& norm, const Vector& z0, const Vector& v, std::vector<double>& out) {
  switch (norm.kind()) {
    case NormKind::P:
      if (norm.exponent() != 2.0) magnitude_breaks(z0, v, std::isinf(norm.exponent()), out);
      break;
    case NormKind::Sup:
    case NormKind::C0Renorm:
      magnitude_breaks(z0, v, true, out);
      break;
    case NormKind::Table:
      magnitude_breaks(norm.table_rows() * z0, norm.table_rows() * v, true, out);
      break;
  }
}

// Kink candidates of the boundary distance along a + t (b - a).
std::vector<double> weight_breaks(const DomainSpec& domain, const Vector& a, const Vector& b) {
  std::vector<double> out;
  const Vector v = b - a;
  const auto& shape = domain.shape();
  if (const auto* ball = std::get_if<Ball>(&shape)) {
    norm_breaks(domain.norm(), a - ball->center, v, out);
  } else if (const auto* punct = std::get_if<Punctured>(&shape)) {
    norm_breaks(domain.norm(), a - punct->point, v, out);
  } else if (const auto* poly = std::get_if<PolytopeIntersection>(&shape)) {
    std::vector<double> g0, g1;
    for (const auto& face : poly->faces) {
      const double dual = dual_evaluate(domain.norm(), face.f).value;
      g0.push_back((face.f.dot(a) - face.c) / dual);
      g1.push_back((face.f.dot(b) - face.c) / dual);
    }
    for (std::size_t i = 0; i < g0.size(); ++i)
      for (std::size_t j = i + 1; j < g0.size(); ++j) {
        const double den = (g1[i] - g0[i]) - (g1[j] - g0[j]);
        if (den == 0.0) continue;
        const double t = (g0[j] - g0[i]) / den;
        if (t > 0.0 && t < 1.0) out.push_back(t);
      }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class SegmentIntegrator {
 public:
  SegmentIntegrator(const DomainSpec& domain, const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                    const QuadratureOptions& opt, Eigen::Index seg)
      : domain_(&domain),
        a_(a),
        dir_(b - a),
        speed_(evaluate(domain.norm(), dir_)),
        opt_(opt),
        rule_(gauss_legendre(opt.points_per_segment)),
        seg_(seg),
        x_(a.size()),
        breaks_(weight_breaks(domain, a, b)) {}

  SegmentIntegrator(const WeightFunction& weight, const NormSpec& norm, const Eigen::Ref<const Vector>& a,
                    const Eigen::Ref<const Vector>& b, const QuadratureOptions& opt, Eigen::Index seg)
      : weight_(&weight),
        a_(a),
        dir_(b - a),
        speed_(evaluate(norm, dir_)),
        opt_(opt),
        rule_(gauss_legendre(opt.points_per_segment)),
        seg_(seg),
        x_(a.size()) {}

  double integrate(double t1) {
    if (speed_ == 0.0 || t1 <= 0.0) return 0.0;
    std::vector<double> knots{0.0};
    for (double t : breaks_)
      if (t < t1) knots.push_back(t);
    knots.push_back(t1);
    std::vector<double> coarse;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) coarse.push_back(panel(knots[i], knots[i + 1]));
    scale_ = std::abs(std::accumulate(coarse.begin(), coarse.end(), 0.0));
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) total += adapt(knots[i], knots[i + 1], coarse[i], 0);
    return total;
  }

 private:
  double panel(double t0, double t1) {
    double s = 0.0;
    for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
      x_.noalias() = a_ + (t0 + (t1 - t0) * rule_.nodes[k]) * dir_;
      s += rule_.weights[k] * weight_at();
    }
    return s * (t1 - t0) * speed_;
  }

  double weight_at() const {
    if (weight_) {
      const double w = (*weight_)(x_);
      if (!(w >= 0.0) || !std::isfinite(w))
        throw InputError("paths::weighted_length: weight is negative or not finite on segment " +
                         std::to_string(seg_));
      return w;
    }
    const double d = domain_->signed_distance(x_);
    if (!(d >= domain_->interior_tolerance(x_)))
      throw ExteriorPointError("paths::qh_length: quadrature node on segment " + std::to_string(seg_) +
                               " is not interior");
    return 1.0 / d;
  }

  double adapt(double t0, double t1, double whole, int depth) {
    const double tm = 0.5 * (t0 + t1);
    const double left = panel(t0, tm);
    const double right = panel(tm, t1);
    const double refined = left + right;
    if (std::abs(refined - whole) <= opt_.rel_tol * std::max(scale_, std::abs(refined))) return refined;
    if (depth >= opt_.max_depth)
      throw NonConvergenceError("paths::qh_length: adaptive quadrature depth exceeded on segment " +
                                std::to_string(seg_));
    return adapt(t0, tm, left, depth + 1) + adapt(tm, t1, right, depth + 1);
  }

  const DomainSpec* domain_ = nullptr;
  const WeightFunction* weight_ = nullptr;
  Vector a_;
  Vector dir_;
  double speed_;
  // Magnitude of the whole segment; panel tolerances are relative to it.
  double scale_ = 0.0;
  const QuadratureOptions& opt_;
  const GaussRule& rule_;
  Eigen::Index seg_;
  Vector x_;
  std::vector<double> breaks_;
};

void check_segment_interior(const DomainSpec& domain, const Polyline& path, Eigen::Index i) {
  if (!segment_is_interior(domain, path.vertex(i), path.vertex(i + 1)))
    throw ExteriorPointError("paths::qh_length: segment " + std::to_string(i) + " leaves the domain");
}

}  // namespace

Vector point_at_arclength(const Polyline& path, const NormSpec& norm, double s) {
  return locate(path, cumulative_norm_length(path, norm), s);
}

double segment_qh_length(const DomainSpec& domain, const Eigen::Ref<const Vector>& a,
                         const Eigen::Ref<const Vector>& b, const QuadratureOptions& options) {
  require(options.points_per_segment >= 2, "qh_length: points_per_segment must be at least 2");
  SegmentIntegrator integrator(domain, a, b, options, 0);
  return integrator.integrate(1.0);
}

std::vector<double> segment_qh_lengths(const Polyline& path, const DomainSpec& domain,
                                       const QuadratureOptions& options) {
  require(options.points_per_segment >= 2, "qh_length: points_per_segment must be at least 2");
  require(path.dimension() == domain.dimension(), "qh_length: path and domain dimensions differ");
  std::vector<double> out(static_cast<std::size_t>(path.segment_count()));
  for (Eigen::Index i = 0; i < path.segment_count(); ++i) {
    if (!domain.is_convex()) check_segment_interior(domain, path, i);
    SegmentIntegrator integrator(domain, path.vertex(i), path.vertex(i + 1), options, i);
    out[i] = integrator.integrate(1.0);
  }
  return out;
}

double qh_length(const Polyline& path, const DomainSpec& domain, const QuadratureOptions& options) {
  const auto parts = segment_qh_lengths(path, domain, options);
  return std::accumulate(parts.begin(), parts.end(), 0.0);
}

double weighted_length(const Polyline& path, const NormSpec& norm, const WeightFunction& weight,
                       const QuadratureOptions& options) {
  require(options.points_per_segment >= 2, "weighted_length: points_per_segment must be at least 2");
  require(path.dimension() == norm.dimension(), "weighted_length: path and norm dimensions differ");
  double total = 0.0;
  for (Eigen::Index i = 0; i < path.segment_count(); ++i) {
    SegmentIntegrator integrator(weight, norm, path.vertex(i), path.vertex(i + 1), options, i);
    total += integrator.integrate(1.0);
  }
  return total;
}

Polyline reparameterize_arclength(const Polyline& path, const NormSpec& norm, int samples) {
  require(samples >= 2, "reparameterize_arclength: at least two samples required");
  const auto cum = cumulative_norm_length(path, norm);
  const double total = cum.back();
  if (!(total > 0.0)) throw InputError("reparameterize_arclength: path has zero length");
  Matrix m(path.dimension(), samples);
  for (int i = 0; i < samples; ++i) m.col(i) = locate(path, cum, total * i / (samples - 1));
  m.col(0) = path.front();
  m.col(samples - 1) = path.back();
  return Polyline(std::move(m));
}

Polyline resample_qh_proportional(const Polyline& path, const DomainSpec& domain, int samples,
                                  const QuadratureOptions& options) {
  require(samples >= 2, "resample_qh_proportional: at least two samples required");
  const auto parts = segment_qh_lengths(path, domain, options);
  std::vector<double> cum(parts.size() + 1, 0.0);
  std::partial_sum(parts.begin(), parts.end(), cum.begin() + 1);
  const double total = cum.back();
  require(total > 0.0, "resample_qh_proportional: path has zero length");

  Matrix m(path.dimension(), samples);
  m.col(0) = path.front();
  m.col(samples - 1) = path.back();
  for (int i = 1; i + 1 < samples; ++i) {
    const double target = total * i / (samples - 1);
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const Eigen::Index j = std::clamp<Eigen::Index>(it - cum.begin() - 1, 0, path.segment_count() - 1);
    const Vector a = path.vertex(j);
    const Vector b = path.vertex(j + 1);
    SegmentIntegrator integrator(domain, a, b, options, j);
    double lo = 0.0, hi = 1.0;
    for (int it2 = 0; it2 < 80; ++it2) {
      const double mid = 0.5 * (lo + hi);
      const double partial = cum[j] + integrator.integrate(mid);
      if (std::abs(partial - target) <= 1e-12 * total) {
        lo = hi = mid;
        break;
      }
      (partial < target ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    m.col(i) = (1.0 - t) * a + t * b;
  }
  return Polyline(std::move(m));
}

Polyline average_paths(const Polyline& p1, const Polyline& p2, double s) {
  require(p1.size() == p2.size(), "average_paths: vertex counts differ (" + std::to_string(p1.size()) + " vs " +
                                      std::to_string(p2.size()) + ")");
  require(p1.dimension() == p2.dimension(), "average_paths: dimensions differ");
  require(s >= 0.0 && s <= 1.0, "average_paths: s must lie in [0, 1]");
  if (s == 0.0) return p1;
  if (s == 1.0) return p2;
  return Polyline((1.0 - s) * p1.vertices() + s * p2.vertices());
}

double max_vertex_separation(const Polyline& p1, const Polyline& p2, const NormSpec& norm) {
  require(p1.size() == p2.size(), "max_vertex_separation: vertex counts differ");
  double sep = 0.0;
  for (Eigen::Index i = 0; i < p1.size(); ++i) sep = std::max(sep, evaluate(norm, p1.vertex(i) - p2.vertex(i)));
  return sep;
}

double point_segment_distance(const NormSpec& norm, const Eigen::Ref<const Vector>& p,
                              const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  const Vector ab = b - a;
  if (norm.kind() == NormKind::P && norm.exponent() == 2.0) {
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - a - t * ab).norm();
  }
  // ||p - a - t ab|| is convex in t.
  auto f = [&](double t) { return evaluate(norm, p - a - t * ab); };
  constexpr double g = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f1, f2});
}

namespace {

// Euclidean point-to-segment distance without temporaries.
double euclid_point_segment(const double* p, const double* a, const double* b, Eigen::Index n) {
  double ab2 = 0.0, apab = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ab = b[k] - a[k];
    ab2 += ab * ab;
    apab += (p[k] - a[k]) * ab;
  }
  const double t = ab2 > 0.0 ? std::clamp(apab / ab2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = p[k] - a[k] - t * (b[k] - a[k]);
    d2 += r * r;
  }
  return std::sqrt(d2);
}

double directed_hausdorff(const Polyline& from, const Polyline& to, const NormSpec& norm, int samples) {
  // Candidate segments are shortlisted by Euclidean distance, then measured
  // in the ambient norm.
  constexpr std::size_t kShortlist = 4;
  const bool euclidean = norm.kind() == NormKind::P && norm.exponent() == 2.0;
  std::vector<std::pair<double, Eigen::Index>> cand(static_cast<std::size_t>(to.segment_count()));
  double worst = 0.0;
  auto visit = [&](const Vector& p) {
    for (Eigen::Index j = 0; j < to.segment_count(); ++j)
      cand[j] = {euclid_point_segment(p.data(), to.vertex(j).data(), to.vertex(j + 1).data(), p.size()), j};
    double best;
    if (euclidean) {
      best = std::min_element(cand.begin(), cand.end())->first;
    } else {
      const std::size_t k = std::min(kShortlist, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
      best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const Eigen::Index j = cand[c].second;
        best = std::min(best, point_segment_distance(norm, p, to.vertex(j), to.vertex(j + 1)));
      }
    }
    worst = std::max(worst, best);
  };
  for (Eigen::Index i = 0; i < from.segment_count(); ++i) {
    for (int k = 0; k <= samples; ++k) {
      const double t = static_cast<double>(k) / (samples + 1);
      visit((1.0 - t) * from.vertex(i) + t * from.vertex(i + 1));
    }
  }
  visit(from.back());
  return worst;
}

}  // namespace

double hausdorff_distance(const Polyline& p1, const Polyline& p2, const NormSpec& norm, int samples_per_segment) {
  require(p1.dimension() == p2.dimension(), "hausdorff_distance: dimension mismatch");
  require(samples_per_segment >= 0, "hausdorff_distance: negative sample count");
  return std::max(directed_hausdorff(p1, p2, norm, samples_per_segment),
                  directed_hausdorff(p2, p1, norm, samples_per_segment));
}

void write_path_csv(std::ostream& os, const Polyline& path, const DomainSpec& domain) {
  const auto cum = cumulative_norm_length(path, domain.norm());
  const auto parts = segment_qh_lengths(path, domain);
  os << "index";
  for (int k = 0; k < path.dimension(); ++k) os << ",x" << k;
  os << ",cum_norm_len,cum_qh_len\n";
  os.precision(17);
  double qh = 0.0;
  for (Eigen::Index i = 0; i < path.size(); ++i) {
    if (i > 0) qh += parts[i - 1];
    os << i;
    for (int k = 0; k < path.dimension(); ++k) os << ',' << path.vertex(i)[k];
    os << ',' << cum[i] << ',' << qh << '\n';
  }
}

}  // namespace qhgeo
