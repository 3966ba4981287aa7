#include "qhgeo/certify.hpp"

#include "qhgeo/parallel.hpp"
#include "qhgeo/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qhgeo {

namespace {

constexpr double kLog2 = std::numbers::ln2;

const HalfSpace& sup_halfspace(const DomainSpec& domain, const char* op) {
  const auto* hs = std::get_if<HalfSpace>(&domain.shape());
  if (!hs || domain.norm().kind() != NormKind::Sup)
    throw InputError(std::string("certify::") + op + ": domain must be a sup-norm half-space");
  return *hs;
}

// Position of t in an increasing grid: index j with grid[j] <= t <= grid[j+1].
Eigen::Index locate(const std::vector<double>& grid, double t) {
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const auto j = static_cast<Eigen::Index>(it - grid.begin()) - 1;
  return std::clamp<Eigen::Index>(j, 0, static_cast<Eigen::Index>(grid.size()) - 2);
}

Vector interpolate(const Matrix& v, const std::vector<double>& grid, double t) {
  const Eigen::Index j = locate(grid, t);
  const double span = grid[j + 1] - grid[j];
  const double u = span > 0.0 ? std::clamp((t - grid[j]) / span, 0.0, 1.0) : 0.0;
  return (1.0 - u) * v.col(j) + u * v.col(j + 1);
}

// Original parameter grid with 1/2 inserted, so every tent is linear on
// each cell.
std::vector<double> grid_with_half(const std::vector<double>& params) {
  std::vector<double> g = params;
  g.push_back(0.5);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace

ParameterizedPath arclength_parameterized(const Polyline& path, const NormSpec& norm) {
  auto cum = cumulative_norm_length(path, norm);
  const double total = cum.back();
  if (!(total > 0.0)) throw InputError("certify::arclength_parameterized: path has zero length");
  for (double& c : cum) c /= total;
  cum.back() = 1.0;
  return {path, std::move(cum)};
}

Vector point_at(const ParameterizedPath& path, double t) {
  require(t >= 0.0 && t <= 1.0, "certify::point_at: parameter outside [0, 1]");
  return interpolate(path.path.vertices(), path.params, t);
}

double subpath_length(const ParameterizedPath& path, const NormSpec& norm, double a, double b) {
  require(0.0 <= a && a <= b && b <= 1.0, "certify::subpath_length: need 0 <= a <= b <= 1");
  const auto& g = path.params;
  const Matrix& v = path.path.vertices();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    const double lo = std::max(a, g[j]);
    const double hi = std::min(b, g[j + 1]);
    if (hi <= lo) continue;
    const double frac = (hi - lo) / (g[j + 1] - g[j]);
    total += frac * evaluate(norm, v.col(j + 1) - v.col(j));
  }
  return total;
}

double TentSpec::operator()(Eigen::Index m, double t) const {
  return std::min(x[m], y[m]) + delta * std::min(t, 1.0 - t);
}

TentSpec make_tents(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), "certify::make_tents: endpoint dimensions differ");
  TentSpec tents{x, y, 0.0, 0};
  tents.delta = (x - y).cwiseAbs().maxCoeff(&tents.distinguished);
  if (!(tents.delta > 0.0)) throw InputError("certify::make_tents: endpoints coincide, no distinguished coordinate");
  return tents;
}

ParameterizedPath apply_shortening(const DomainSpec& domain, const Polyline& path, int k) {
  const HalfSpace& hs = sup_halfspace(domain, "apply_shortening");
  const Eigen::Index n = domain.dimension();
  require(path.dimension() == n, "certify::apply_shortening: path dimension does not match the domain");
  require(k >= 0 && k <= n, "certify::apply_shortening: k must lie in [0, N]");
  ParameterizedPath base = arclength_parameterized(path, domain.norm());
  const Vector signs = (hs.f.array() < 0.0).select(Vector::Constant(n, -1.0), Vector::Ones(n));
  const Matrix v = signs.asDiagonal() * path.vertices();
  const TentSpec tents = make_tents(v.col(0), v.col(v.cols() - 1));
  if (k == 0) return base;

  const std::vector<double> cells = grid_with_half(base.params);
  std::vector<double> ts = cells;
  for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
    const Vector p0 = interpolate(v, base.params, cells[j]);
    const Vector p1 = interpolate(v, base.params, cells[j + 1]);
    for (Eigen::Index m = 0; m < k; ++m) {
      const double g0 = p0[m] - tents(m, cells[j]);
      const double g1 = p1[m] - tents(m, cells[j + 1]);
      if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0))
        ts.push_back(cells[j] + (cells[j + 1] - cells[j]) * g0 / (g0 - g1));
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return b - a <= 1e-15; }), ts.end());
  ts.back() = 1.0;

  std::vector<Vector> pts;
  std::vector<double> params;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Vector p = interpolate(v, base.params, ts[i]);
    for (Eigen::Index m = 0; m < k; ++m) p[m] = std::max(p[m], tents(m, ts[i]));
    p = signs.asDiagonal() * p;
    const bool last = i + 1 == ts.size();
    if (!pts.empty() && (p - pts.back()).lpNorm<Eigen::Infinity>() <= 1e-12) {
      if (!last) continue;
      pts.back() = p;
      params.back() = ts[i];
      continue;
    }
    pts.push_back(std::move(p));
    params.push_back(ts[i]);
  }
  pts.front() = path.front();
  pts.back() = path.back();
  return {Polyline::from_points(pts), std::move(params)};
}

NormCheck verify_norm_nonincrease(const ParameterizedPath& original, const ParameterizedPath& modified,
                                  const NormSpec& norm, int windows, std::uint64_t seed) {
  require(windows >= 1, "certify::verify_norm_nonincrease: windows must be positive");
  auto rng = make_rng(seed, 0x5b7au);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  NormCheck out;
  out.max_violation = -std::numeric_limits<double>::infinity();
  for (int w = 0; w < windows; ++w) {
    double a = unif(rng), b = unif(rng);
    if (a > b) std::swap(a, b);
    const double v = subpath_length(modified, norm, a, b) - subpath_length(original, norm, a, b);
    out.max_violation = std::max(out.max_violation, v);
  }
  out.ok = out.max_violation <= 1e-9;
  return out;
}

ShorteningReport shortening_report(const DomainSpec& domain, const Polyline& path, int k) {
  const HalfSpace& hs = sup_halfspace(domain, "shortening_report");
  ShorteningReport report;
  report.k = k;
  for (int j = 0; j <= k; ++j) {
    const ParameterizedPath pj = apply_shortening(domain, path, j);
    report.qh_lengths.push_back(qh_length(pj.path, domain));
    report.weights_at_half.push_back(hs.f.dot(point_at(pj, 0.5)));
    if (j > 0) {
      report.lengths_nonincreasing &= report.qh_lengths[j] <= report.qh_lengths[j - 1] + 1e-8;
      report.weights_nondecreasing &= report.weights_at_half[j] >= report.weights_at_half[j - 1] - 1e-12;
    }
  }

  // Measure of {t : gamma_0(t) < alpha_0(t)} in the sign-normalized frame.
  const ParameterizedPath base = arclength_parameterized(path, domain.norm());
  const double s0 = hs.f[0] < 0.0 ? -1.0 : 1.0;
  const Matrix v = path.vertices();
  Vector x = v.col(0), y = v.col(v.cols() - 1);
  x[0] *= s0;
  y[0] *= s0;
  const TentSpec tents = make_tents(x, y);
  const std::vector<double> cells = grid_with_half(base.params);
  for (std::size_t j = 0; j + 1 < cells.size(); ++j) {
    const double g0 = s0 * interpolate(v, base.params, cells[j])[0] - tents(0, cells[j]);
    const double g1 = s0 * interpolate(v, base.params, cells[j + 1])[0] - tents(0, cells[j + 1]);
    const double width = cells[j + 1] - cells[j];
    if (g0 < 0.0 && g1 < 0.0)
      report.below_tent_measure += width;
    else if (g0 < 0.0 && g1 >= 0.0)
      report.below_tent_measure += width * g0 / (g0 - g1);
    else if (g0 >= 0.0 && g1 < 0.0)
      report.below_tent_measure += width * g1 / (g1 - g0);
  }
  return report;
}

AveragingMargin averaging_strictness(const DomainSpec& domain, const Polyline& p1, const Polyline& p2, double s) {
  require(s >= 0.0 && s <= 1.0, "certify::averaging_strictness: s must lie in [0, 1]");
  if (p1.size() != p2.size())
    throw InputError("certify::averaging_strictness: alignment failure, vertex counts differ");
  if ((p1.front() - p2.front()).lpNorm<Eigen::Infinity>() > 1e-12 ||
      (p1.back() - p2.back()).lpNorm<Eigen::Infinity>() > 1e-12)
    throw InputError("certify::averaging_strictness: alignment failure, endpoints differ");
  AveragingMargin out;
  out.length_p1 = qh_length(p1, domain);
  out.length_p2 = qh_length(p2, domain);
  out.length_average = qh_length(average_paths(p1, p2, s), domain);
  out.margin = s * out.length_p2 + (1.0 - s) * out.length_p1 - out.length_average;
  out.separation = max_vertex_separation(p1, p2, domain.norm());
  return out;
}

TieCertificate halfplane_tie_certificate(const SolverConfig& config, int starts, unsigned threads) {
  require(starts >= 1, "certify::halfplane_tie_certificate: starts must be positive");
  const DomainSpec domain = DomainSpec::half_space(NormSpec::sup(2), Vector{{0.0, 1.0}}, 0.0);
  const Vector x{{0.0, 1.0}}, y{{0.0, 2.0}};
  TieCertificate out;
  out.straight_length = qh_length(Polyline::segment(x, y), domain);
  out.tent_length = qh_length(Polyline::from_points({x, Vector{{0.5, 1.5}}, y}), domain);
  out.start_lengths.assign(static_cast<std::size_t>(starts), 0.0);
  parallel_for(out.start_lengths.size(), threads, [&](std::size_t i) {
    SolverConfig cfg = config;
    cfg.seed = config.seed + i;
    out.start_lengths[i] = solve_from(domain, random_detour(domain, x, y, config, i), cfg).qh_length;
  });
  out.min_start_length = *std::min_element(out.start_lengths.begin(), out.start_lengths.end());
  out.pass = std::abs(out.straight_length - kLog2) <= 1e-8 && std::abs(out.tent_length - kLog2) <= 1e-8 &&
             out.min_start_length >= kLog2 - 1e-6;
  return out;
}

AlignedPair random_aligned_pair(std::mt19937_64& rng, int vertices) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> mode(1, 3);
  const NormSpec norm = NormSpec::p_norm(2, 2.0);
  const bool use_ball = unif(rng) < 0.5;

  for (;;) {
    constexpr int kSamples = 400;
    Matrix g(2, kSamples);
    std::optional<DomainSpec> domain;
    if (use_ball) {
      const Vector c{{2.0 * unif(rng) - 1.0, 2.0 * unif(rng) - 1.0}};
      const double radius = 0.5 + unif(rng);
      const double th = 2.0 * std::numbers::pi * unif(rng);
      const Vector u{{std::cos(th), std::sin(th)}};
      const Vector a = c + radius * (0.05 + 0.75 * unif(rng)) * u;
      const Vector b = c - radius * (0.05 + 0.75 * unif(rng)) * u;
      domain = DomainSpec::ball(norm, c, radius);
      for (int i = 0; i < kSamples; ++i) {
        const double t = static_cast<double>(i) / (kSamples - 1);
        g.col(i) = (1.0 - t) * a + t * b;
      }
    } else {
      // Upper half-plane geodesic: arc of the circle centred on the axis.
      const double a = 2.0 * unif(rng) - 1.0;
      const double b = a + 0.2 + 1.8 * unif(rng);
      const double ya = 0.3 + 1.2 * unif(rng), yb = 0.3 + 1.2 * unif(rng);
      const double c = ((b * b + yb * yb) - (a * a + ya * ya)) / (2.0 * (b - a));
      const double r = std::hypot(a - c, ya);
      const double t0 = std::atan2(ya, a - c), t1 = std::atan2(yb, b - c);
      // Random rotation of the whole configuration.
      const double rot = 2.0 * std::numbers::pi * unif(rng);
      Eigen::Matrix2d rm;
      rm << std::cos(rot), -std::sin(rot), std::sin(rot), std::cos(rot);
      domain = DomainSpec::half_space(norm, rm * Vector{{0.0, 1.0}}, 0.0);
      for (int i = 0; i < kSamples; ++i) {
        const double th = t0 + (t1 - t0) * i / (kSamples - 1);
        g.col(i) = rm * Vector{{c + r * std::cos(th), r * std::sin(th)}};
      }
    }
    auto perturb = [&]() {
      const double amp = 0.2 * unif(rng);
      const int m = mode(rng);
      const Vector dir{{gauss(rng), gauss(rng)}};
      Matrix p = g;
      for (int i = 0; i < kSamples; ++i) {
        const double t = static_cast<double>(i) / (kSamples - 1);
        p.col(i) += amp * std::sin(m * std::numbers::pi * t) * dir;
      }
      return p;
    };
    const Matrix p1 = perturb(), p2 = perturb();
    bool ok = true;
    for (int i = 0; i < kSamples && ok; ++i)
      ok = domain->signed_distance(p1.col(i)) > 0.05 && domain->signed_distance(p2.col(i)) > 0.05;
    if (!ok) continue;
    return {*domain, resample_qh_proportional(Polyline(p1), *domain, vertices),
            resample_qh_proportional(Polyline(p2), *domain, vertices)};
  }
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"tie", "shortening", "subpath", "averaging", "jensen", "average_norm"};
  return names;
}

namespace {

// Random instance for the truncated-c0 suites: sup-norm half-space {f.x > 0}
// in R^N with random signs, and either the straight path or a random
// polyline between random interior endpoints.
struct TruncatedInstance {
  DomainSpec domain;
  Polyline path;
  bool straight;
};

TruncatedInstance truncated_instance(std::uint64_t seed, std::size_t i) {
  static constexpr int kDims[] = {4, 8, 16};
  auto rng = make_rng(seed, 0xc0c0u + i);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = kDims[i % 3];
  Vector f(n), signs(n);
  for (int m = 0; m < n; ++m) {
    f[m] = 0.05 + unif(rng);
    signs[m] = unif(rng) < 0.25 ? -1.0 : 1.0;
  }
  f /= f.sum();
  auto point = [&]() {
    Vector p(n);
    for (int m = 0; m < n; ++m) p[m] = 0.2 + 1.3 * unif(rng);
    return Vector(signs.asDiagonal() * p);
  };
  const bool straight = i % 2 == 0;
  std::vector<Vector> pts{point()};
  if (!straight)
    for (int w = 0; w < 4; ++w) pts.push_back(point());
  pts.push_back(point());
  return {DomainSpec::half_space(NormSpec::sup(n), signs.asDiagonal() * f, 0.0), Polyline::from_points(pts),
          straight};
}

SuiteResult collect(const std::string& name, const std::vector<double>& margins) {
  SuiteResult r{name, static_cast<int>(margins.size()), true, std::numeric_limits<double>::infinity()};
  for (double m : margins) r.worst_margin = std::min(r.worst_margin, m);
  r.pass = !margins.empty() && r.worst_margin >= 0.0;
  return r;
}

}  // namespace

SuiteResult run_suite(const std::string& name, std::uint64_t seed, unsigned threads) {
  constexpr std::size_t kInstances = 100;
  std::vector<double> margins;
  if (name == "tie") {
    SolverConfig cfg;
    cfg.seed = seed;
    const auto cert = halfplane_tie_certificate(cfg, 32, threads);
    margins = {1e-8 - std::abs(cert.straight_length - kLog2), 1e-8 - std::abs(cert.tent_length - kLog2),
               cert.min_start_length - (kLog2 - 1e-6)};
    auto r = collect(name, margins);
    r.instances = 32;
    return r;
  }
  margins.assign(kInstances, 0.0);
  if (name == "shortening") {
    parallel_for(kInstances, threads, [&](std::size_t i) {
      const auto inst = truncated_instance(seed, i);
      const int n = inst.domain.dimension();
      const auto rep = shortening_report(inst.domain, inst.path, n);
      double m = std::numeric_limits<double>::infinity();
      for (int j = 1; j <= n; ++j) {
        m = std::min(m, 1e-8 - (rep.qh_lengths[j] - rep.qh_lengths[j - 1]));
        m = std::min(m, rep.weights_at_half[j] - rep.weights_at_half[j - 1] + 1e-12);
      }
      if (rep.below_tent_measure >= 0.1) m = std::min(m, (rep.qh_lengths.front() - rep.qh_lengths.back()) - 1e-4);
      margins[i] = m;
    });
  } else if (name == "subpath") {
    parallel_for(kInstances, threads, [&](std::size_t i) {
      const auto inst = truncated_instance(seed, i);
      const int n = inst.domain.dimension();
      const auto original = arclength_parameterized(inst.path, inst.domain.norm());
      double m = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= n; k *= 2) {
        const auto check = verify_norm_nonincrease(original, apply_shortening(inst.domain, inst.path, k),
                                                   inst.domain.norm(), 100, seed + i);
        m = std::min(m, 1e-9 - check.max_violation);
      }
      margins[i] = m;
    });
  } else if (name == "averaging") {
    parallel_for(kInstances, threads, [&](std::size_t i) {
      auto rng = make_rng(seed, 0xa7e0u + i);
      const auto pair = random_aligned_pair(rng);
      const double s = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
      const auto avg = averaging_strictness(pair.domain, pair.p1, pair.p2, s);
      margins[i] = avg.separation > 1e-2 ? avg.margin - 1e-6 : avg.margin + 1e-8;
    });
  } else if (name == "jensen") {
    parallel_for(kInstances, threads, [&](std::size_t i) {
      auto rng = make_rng(seed, 0x1e50u + i);
      const int dim = 2 + static_cast<int>(i % 3);
      const NormSpec norms[] = {NormSpec::p_norm(dim, 2.0), NormSpec::sup(dim), NormSpec::p_norm(dim, 3.0)};
      const auto dist = DiscreteUnitDistribution::random(norms[(i / 3) % 3], rng);
      double m = std::numeric_limits<double>::infinity();
      for (ConvexTest phi : {ConvexTest::Norm, ConvexTest::NormSquared, ConvexTest::MaxCoordinate}) {
        const auto c = check_jensen_lemma(dist, phi);
        m = std::min(m, c.rhs + 1e-12 - c.lhs);
      }
      margins[i] = m;
    });
  } else if (name == "average_norm") {
    const ModulusProfile profile = euclidean_modulus_profile();
    parallel_for(kInstances, threads, [&](std::size_t i) {
      auto rng = make_rng(seed, 0xed00u + i);
      const auto dist = DiscreteUnitDistribution::random(NormSpec::p_norm(2 + static_cast<int>(i % 3), 2.0), rng);
      const auto c = check_average_norm_lemma(dist, profile);
      margins[i] = c.rhs + 1e-6 - c.lhs;
    });
  } else {
    throw InputError("certify::run_suite: unknown suite '" + name + "'");
  }
  return collect(name, margins);
}

}  // namespace qhgeo
