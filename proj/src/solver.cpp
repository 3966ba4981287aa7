#include "qhgeo/solver.hpp"

#include "qhgeo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace qhgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Descent stops once `kWindow` accepted steps gain less than kWindowTol (relative).
constexpr int kWindow = 10;
// Continuation for non-smooth polyhedral norms: descent on smoothed
// objectives with growing exponent before the exact stage of every round.
constexpr double kSmoothingSchedule[] = {8.0, 32.0, 128.0, 512.0};
constexpr int kSmoothingRounds = 2;
constexpr int kSmoothingIterations = 500;
constexpr double kWindowTol = 1e-12;

// Fixed-rule QH length of single segments; +inf when a node (or, in a
// non-convex domain, any point of the segment) is not interior.
class PathObjective {
 public:
  PathObjective(const DomainSpec& domain, int order)
      : domain_(domain), rule_(gauss_legendre(order)), x_(domain.dimension()), dir_(domain.dimension()) {}

  double segment(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    dir_ = b - a;
    const double speed = smooth_p_ > 0.0 ? smoothed_speed() : evaluate(domain_.norm(), dir_);
    if (speed == 0.0) return 0.0;
    if (!domain_.is_convex() && !segment_is_interior(domain_, a, b)) return kInf;
    double s = 0.0;
    for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
      x_.noalias() = a + rule_.nodes[k] * dir_;
      const double d = domain_.signed_distance(x_);
      if (!(d > 0.0) || (d < 1e-6 && d < domain_.interior_tolerance(x_))) return kInf;
      s += rule_.weights[k] / d;
    }
    return s * speed;
  }

  double total(const Matrix& v, std::vector<double>& seg) {
    seg.resize(static_cast<std::size_t>(v.cols() - 1));
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < v.cols(); ++i) {
      seg[i] = segment(v.col(i), v.col(i + 1));
      f += seg[i];
    }
    return f;
  }

  const DomainSpec& domain() const { return domain_; }

  /// p > 0 replaces a polyhedral norm max_i |a_i.x| by (sum_i |a_i.x|^p)^(1/p),
  /// which is smooth away from 0 and over-estimates by at most rows^(1/p).
  void set_smoothing(double p) { smooth_p_ = p; }

 private:
  double smoothed_speed() {
    const NormSpec& norm = domain_.norm();
    z_ = norm.kind() == NormKind::Table ? Vector(norm.table_rows() * dir_) : dir_;
    const double m = z_.lpNorm<Eigen::Infinity>();
    if (m == 0.0) return 0.0;
    return m * std::pow((z_.array().abs() / m).pow(smooth_p_).sum(), 1.0 / smooth_p_);
  }

  double smooth_p_ = 0.0;
  Vector z_;
  const DomainSpec& domain_;
  const GaussRule& rule_;
  Vector x_;
  Vector dir_;
};

struct RoundOutcome {
  bool stationary = false;
  int iterations = 0;
};

// Quasi-Newton (limited-memory BFGS) directions with Armijo backtracking on
// the interior vertices of `v`. The objective never increases across
// accepted steps.
RoundOutcome descend(PathObjective& obj, Matrix& v, const SolverConfig& cfg, std::vector<double>* trace) {
  const Eigen::Index dim = v.rows();
  const Eigen::Index interior = v.cols() - 2;
  RoundOutcome out;
  if (interior <= 0) {
    out.stationary = true;
    return out;
  }
  const DomainSpec& domain = obj.domain();
  const Eigen::Index nvar = dim * interior;

  std::vector<double> seg;
  double f = obj.total(v, seg);
  if (!std::isfinite(f)) throw InputError("solver: initial path is not interior");

  std::vector<double> dist(static_cast<std::size_t>(interior));
  auto refresh_dist = [&](const Matrix& m) {
    for (Eigen::Index i = 0; i < interior; ++i) dist[i] = domain.signed_distance(m.col(i + 1));
  };
  refresh_dist(v);

  // Removes the component along the local chord v[i+1] - v[i-1]; sliding
  // vertices along the path barely changes the length and stalls descent.
  auto project = [&](Vector& g) {
    for (Eigen::Index i = 1; i <= interior; ++i) {
      Vector t = v.col(i + 1) - v.col(i - 1);
      const double tn = t.norm();
      if (!(tn > 0.0)) continue;
      t /= tn;
      auto gi = g.segment((i - 1) * dim, dim);
      gi -= gi.dot(t) * t;
    }
  };

  auto gradient = [&](Vector& g) {
    g.resize(nvar);
    for (Eigen::Index i = 1; i <= interior; ++i) {
      const double h = cfg.fd_step * dist[i - 1];
      const double base = seg[i - 1] + seg[i];
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double keep = v(k, i);
        v(k, i) = keep + h;
        const double fp = obj.segment(v.col(i - 1), v.col(i)) + obj.segment(v.col(i), v.col(i + 1));
        v(k, i) = keep - h;
        const double fm = obj.segment(v.col(i - 1), v.col(i)) + obj.segment(v.col(i), v.col(i + 1));
        v(k, i) = keep;
        double gk = 0.0;
        if (std::isfinite(fp) && std::isfinite(fm))
          gk = (fp - fm) / (2.0 * h);
        else if (std::isfinite(fp))
          gk = (fp - base) / h;
        else if (std::isfinite(fm))
          gk = (base - fm) / h;
        g[(i - 1) * dim + k] = gk;
      }
    }
    project(g);
  };

  auto flat = [&](Matrix& m) { return Eigen::Map<Vector>(m.col(1).data(), nvar); };

  struct Pair {
    Vector s, y;
    double rho;
  };
  std::deque<Pair> memory;
  Vector g, gnew, d;
  gradient(g);
  Matrix trial(v.rows(), v.cols());
  std::vector<double> trial_seg;
  std::deque<double> window{f};

  for (int it = 0; it < cfg.max_iterations; ++it) {
    // Two-loop recursion.
    d = -g;
    std::vector<double> alpha(memory.size());
    for (std::size_t j = memory.size(); j-- > 0;) {
      alpha[j] = memory[j].rho * memory[j].s.dot(d);
      d -= alpha[j] * memory[j].y;
    }
    if (!memory.empty()) {
      const auto& last = memory.back();
      d *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t j = 0; j < memory.size(); ++j) {
      const double beta = memory[j].rho * memory[j].y.dot(d);
      d += (alpha[j] - beta) * memory[j].s;
    }
    project(d);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      memory.clear();
      d = -g;
      slope = g.dot(d);
    }
    if (!(slope < 0.0)) {
      out.stationary = true;
      break;
    }

    double step = 1.0;
    if (memory.empty()) {
      double move = 0.0, scale = kInf;
      for (Eigen::Index i = 0; i < interior; ++i) {
        move = std::max(move, d.segment(i * dim, dim).lpNorm<Eigen::Infinity>());
        scale = std::min(scale, dist[i]);
      }
      step = std::min(1.0, 0.1 * scale / move);
    }

    bool accepted = false;
    double ftrial = f;
    for (int ls = 0; ls < 60; ++ls, step *= cfg.shrink) {
      trial = v;
      flat(trial) += step * d;
      bool guard_ok = true;
      for (Eigen::Index i = 0; i < interior && guard_ok; ++i)
        guard_ok = domain.signed_distance(trial.col(i + 1)) >= 0.5 * dist[i];
      if (!guard_ok) continue;
      ftrial = obj.total(trial, trial_seg);
      if (std::isfinite(ftrial) && ftrial <= f + cfg.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      out.stationary = true;
      break;
    }

    const Vector s = step * d;
    v.swap(trial);
    seg.swap(trial_seg);
    const double prev = f;
    f = ftrial;
    refresh_dist(v);
    gradient(gnew);
    Vector y = gnew - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      memory.push_back({s, std::move(y), 1.0 / sy});
      if (static_cast<int>(memory.size()) > cfg.history) memory.pop_front();
    }
    g.swap(gnew);
    ++out.iterations;
    if (trace) trace->push_back(f);

    (void)prev;
    window.push_back(f);
    if (static_cast<int>(window.size()) > kWindow) {
      if (window.front() - f <= kWindowTol * f) {
        out.stationary = true;
        break;
      }
      window.pop_front();
    }
  }
  return out;
}

Matrix compact(const Matrix& v) {
  std::vector<Eigen::Index> keep{0};
  for (Eigen::Index i = 1; i < v.cols(); ++i) {
    const bool last = i == v.cols() - 1;
    if ((v.col(i) - v.col(keep.back())).lpNorm<Eigen::Infinity>() > 1e-12) {
      keep.push_back(i);
    } else if (last) {
      keep.back() = i;
    }
  }
  if (keep.size() < 2) keep = {0, v.cols() - 1};
  Matrix out(v.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = v.col(keep[j]);
  return out;
}

// Doubles the interior vertex count. Convex domains resample by arclength;
// elsewhere midpoints are inserted so the image (and interiority) is kept.
Matrix refine(const Matrix& v, const DomainSpec& domain) {
  const Eigen::Index interior = v.cols() - 2;
  const int target = static_cast<int>(2 * std::max<Eigen::Index>(interior, 1) + 2);
  if (domain.is_convex()) return reparameterize_arclength(Polyline(compact(v)), domain.norm(), target).vertices();
  Matrix out(v.rows(), 2 * v.cols() - 1);
  for (Eigen::Index i = 0; i + 1 < v.cols(); ++i) {
    out.col(2 * i) = v.col(i);
    out.col(2 * i + 1) = 0.5 * (v.col(i) + v.col(i + 1));
  }
  out.col(out.cols() - 1) = v.col(v.cols() - 1);
  return out;
}

// Joins the points in order, giving each leg a share of `vertices` in
// proportion to its length; the corners are kept exactly.
Polyline subdivide(const std::vector<Vector>& corners, const NormSpec& norm, int vertices) {
  const std::size_t legs = corners.size() - 1;
  std::vector<double> len(legs);
  double total = 0.0;
  for (std::size_t i = 0; i < legs; ++i) total += len[i] = evaluate(norm, corners[i + 1] - corners[i]);
  const int pieces_total = std::max<int>(static_cast<int>(legs), vertices - 1);
  std::vector<Vector> pts{corners.front()};
  int used = 0;
  for (std::size_t i = 0; i < legs; ++i) {
    int pieces = i + 1 == legs ? pieces_total - used
                               : std::max(1, static_cast<int>(std::lround(pieces_total * len[i] / total)));
    pieces = std::max(1, std::min(pieces, pieces_total - used - static_cast<int>(legs - i - 1)));
    used += pieces;
    for (int k = 1; k <= pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      pts.push_back((1.0 - t) * corners[i] + t * corners[i + 1]);
    }
    pts.back() = corners[i + 1];
  }
  return Polyline::from_points(pts);
}

bool legs_interior(const DomainSpec& domain, const std::vector<Vector>& corners) {
  for (std::size_t i = 0; i + 1 < corners.size(); ++i)
    if (!segment_is_interior(domain, corners[i], corners[i + 1])) return false;
  return true;
}

Vector random_direction(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(dim);
  do {
    for (Eigen::Index k = 0; k < dim; ++k) u[k] = gauss(rng);
  } while (!(u.norm() > 1e-12));
  return u / u.norm();
}

void check_endpoints(const DomainSpec& domain, const Vector& x, const Vector& y) {
  require(x.size() == domain.dimension() && y.size() == domain.dimension(),
          "solver: endpoint dimension does not match the domain");
  boundary_distance(domain, x);
  boundary_distance(domain, y);
  if (!(evaluate(domain.norm(), x - y) > 0.0)) throw InputError("solver: endpoints coincide");
}

}  // namespace

double qh_lower_bound(const DomainSpec& domain, const Vector& x, const Vector& y) {
  const double dmin = std::min(boundary_distance(domain, x), boundary_distance(domain, y));
  return std::log1p(evaluate(domain.norm(), x - y) / dmin);
}

Polyline initial_path(const DomainSpec& domain, const Vector& x, const Vector& y, const SolverConfig& config) {
  check_endpoints(domain, x, y);
  require(config.initial_vertices >= 3, "solver: initial_vertices must be at least 3");
  if (segment_is_interior(domain, x, y)) return Polyline::segment(x, y, config.initial_vertices - 1);
  auto rng = make_rng(config.seed, 0xde70u);
  std::uniform_real_distribution<double> unif(0.1, 1.5);
  const double span = (x - y).norm();
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector offset = unif(rng) * span * random_direction(rng, x.size());
    std::vector<Vector> corners{x, x + (y - x) / 3.0 + offset, x + 2.0 * (y - x) / 3.0 + offset, y};
    if (legs_interior(domain, corners)) return subdivide(corners, domain.norm(), config.initial_vertices);
  }
  throw NoPathError("solver: no interior initial path found after 1000 waypoint trials");
}

Polyline random_detour(const DomainSpec& domain, const Vector& x, const Vector& y, const SolverConfig& config,
                       std::uint64_t stream) {
  check_endpoints(domain, x, y);
  auto rng = make_rng(config.seed + stream, 0x5eedu);
  std::uniform_real_distribution<double> unif(0.1, 0.6);
  const double span = (x - y).norm();
  const Vector mid = 0.5 * (x + y);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector w = mid + unif(rng) * span * random_direction(rng, x.size());
    std::vector<Vector> corners{x, w, y};
    if (legs_interior(domain, corners)) return subdivide(corners, domain.norm(), config.initial_vertices);
  }
  throw NoPathError("solver: no interior detour found after 1000 waypoint trials");
}

GeodesicResult solve_from(const DomainSpec& domain, const Polyline& initial, const SolverConfig& config) {
  require(config.initial_vertices >= 3 && config.history >= 1 && config.quadrature_points >= 1 &&
          config.max_refinements >= 0 && config.max_iterations >= 0,
          "solver: invalid configuration");
  require(config.shrink > 0.0 && config.shrink < 1.0 && config.sufficient_decrease > 0.0 && config.fd_step > 0.0 &&
              config.round_tol > 0.0,
          "solver: tolerances must be positive");
  const Vector x = initial.front();
  const Vector y = initial.back();
  check_endpoints(domain, x, y);

  PathObjective obj(domain, config.quadrature_points);
  const NormKind kind = domain.norm().kind();
  const bool polyhedral = kind == NormKind::Sup || kind == NormKind::Table;
  GeodesicResult result{initial, 0.0, 0.0, 0.0, false, {}, {}, 0, false, {}};
  Matrix v = initial.vertices();
  std::vector<double> seg;
  bool round_rule = false;
  bool stationary = false;
  Matrix best = v;
  double best_length = kInf;
  for (int round = 0; round <= config.max_refinements; ++round) {
    if (round > 0) v = refine(v, domain);
    if (polyhedral && round < kSmoothingRounds) {
      SolverConfig staged = config;
      staged.max_iterations = std::min(config.max_iterations, kSmoothingIterations);
      for (double p : kSmoothingSchedule) {
        obj.set_smoothing(p);
        result.iterations += descend(obj, v, staged, nullptr).iterations;
      }
      obj.set_smoothing(0.0);
    }
    const RoundOutcome outcome = descend(obj, v, config, config.record_trace ? &result.trace : nullptr);
    stationary = outcome.stationary;
    result.iterations += outcome.iterations;
    result.round_lengths.push_back(obj.total(v, seg));
    if (result.round_lengths.back() < best_length) {
      best_length = result.round_lengths.back();
      best = v;
    }
    const auto r = result.round_lengths.size();
    if (r < 2) continue;
    const double gain = result.round_lengths[r - 2] - result.round_lengths[r - 1];
    if (gain >= 0.0 && gain < config.round_tol * result.round_lengths[r - 1]) {
      round_rule = true;
      break;
    }
  }
  result.converged = round_rule || stationary;
  result.path = Polyline(compact(best));
  result.qh_length = qh_length(result.path, domain);

  result.lower_bound = qh_lower_bound(domain, x, y);
  result.straight_segment_interior = segment_is_interior(domain, x, y);
  if (result.straight_segment_interior) {
    const Polyline straight = Polyline::segment(x, y);
    const double straight_len = qh_length(straight, domain);
    if (straight_len < result.qh_length) {
      result.path = straight;
      result.qh_length = straight_len;
    }
    result.upper_bound = straight_len;
  } else {
    result.upper_bound = result.qh_length;
  }
  result.starts.push_back({config.seed, result.qh_length});
  return result;
}

GeodesicResult solve_geodesic(const DomainSpec& domain, const Vector& x, const Vector& y, const SolverConfig& config) {
  return solve_from(domain, initial_path(domain, x, y, config), config);
}

UniquenessReport probe_uniqueness(const DomainSpec& domain, const Vector& x, const Vector& y,
                                  const SolverConfig& config, int starts, unsigned threads) {
  require(starts >= 2, "probe_uniqueness: at least two starts required");
  check_endpoints(domain, x, y);
  std::vector<std::optional<GeodesicResult>> runs(static_cast<std::size_t>(starts));
  parallel_for(runs.size(), threads, [&](std::size_t s) {
    SolverConfig cfg = config;
    cfg.seed = config.seed + s;
    runs[s] = solve_from(domain, random_detour(domain, x, y, config, s), cfg);
  });

  UniquenessReport report;
  double lmin = kInf, lmax = 0.0;
  for (auto& r : runs) {
    lmin = std::min(lmin, r->qh_length);
    lmax = std::max(lmax, r->qh_length);
    report.runs.push_back(std::move(*r));
  }
  report.length_spread = (lmax - lmin) / lmin;
  report.reference_norm_length = kInf;
  for (const auto& r : report.runs)
    report.reference_norm_length = std::min(report.reference_norm_length, norm_length(r.path, domain.norm()));
  for (std::size_t i = 0; i < report.runs.size(); ++i)
    for (std::size_t j = i + 1; j < report.runs.size(); ++j)
      report.hausdorff_spread = std::max(
          report.hausdorff_spread, hausdorff_distance(report.runs[i].path, report.runs[j].path, domain.norm()));
  report.unique_consistent =
      report.hausdorff_spread < report.hausdorff_threshold * report.reference_norm_length &&
      report.length_spread < report.length_threshold;
  return report;
}

}  // namespace qhgeo
