#include "qhgeo/modulus.hpp"

#include "qhgeo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace qhgeo {

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  require(xs_.size() == ys_.size() && !xs_.empty(), "PiecewiseLinear: mismatched breakpoints");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    require(xs_[i] > xs_[i - 1], "PiecewiseLinear: breakpoints must increase");
}

double PiecewiseLinear::operator()(double x) const {
  require(!xs_.empty(), "PiecewiseLinear: empty function");
  const double tol = 1e-12 * std::max(1.0, std::abs(xs_.back()));
  if (x < xs_.front() - tol || x > xs_.back() + tol)
    throw InputError("PiecewiseLinear: argument " + std::to_string(x) + " outside [" +
                     std::to_string(xs_.front()) + ", " + std::to_string(xs_.back()) + "]");
  if (xs_.size() == 1 || x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return ys_[j - 1] + t * (ys_[j] - ys_[j - 1]);
}

PiecewiseLinear convex_minorant(std::vector<std::pair<double, double>> samples) {
  require(samples.size() >= 2, "convex_minorant: at least two samples required");
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 1; i < samples.size(); ++i)
    require(samples[i].first != samples[i - 1].first, "convex_minorant: sample abscissae must be distinct");

  // Andrew's monotone chain, lower half.
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : samples) {
    while (hull.size() >= 2) {
      const auto& o = hull[hull.size() - 2];
      const auto& a = hull.back();
      const double cross = (a.first - o.first) * (p.second - o.second) -
                           (a.second - o.second) * (p.first - o.first);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  std::vector<double> xs, ys;
  for (const auto& [x, y] : hull) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

ModulusProfile make_profile(std::vector<std::pair<double, double>> samples) {
  require(samples.size() >= 2, "make_profile: at least two samples required");
  std::sort(samples.begin(), samples.end());
  auto monotone = samples;
  for (std::size_t i = monotone.size() - 1; i-- > 0;)
    monotone[i].second = std::min(monotone[i].second, monotone[i + 1].second);
  ModulusProfile profile;
  profile.minorant = convex_minorant(std::move(monotone));
  profile.samples = std::move(samples);
  profile.power_fit = fit_power_type(profile);
  return profile;
}

std::optional<PowerFit> fit_power_type(const ModulusProfile& profile) {
  if (profile.samples.size() < 4 || profile.minorant.empty()) return std::nullopt;
  std::vector<double> lx, ly;
  for (const auto& [eps, _] : profile.samples) {
    const double m = profile.minorant(eps);
    if (!(m > 0.0) || !(eps > 0.0)) return std::nullopt;
    lx.push_back(std::log(eps));
    ly.push_back(std::log(m));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) return std::nullopt;
  PowerFit fit;
  fit.p = std::max(2.0, sxy / sxx);
  double logK = my - fit.p * mx;
  for (std::size_t i = 0; i < lx.size(); ++i) logK = std::min(logK, ly[i] - fit.p * lx[i]);
  fit.K = std::exp(logK);
  return fit;
}

std::vector<double> default_eps_grid(int points, double lo, double hi) {
  require(points >= 2 && lo > 0.0 && hi > lo && hi <= 2.0, "default_eps_grid: bad range");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  grid.back() = hi;
  return grid;
}

namespace {

constexpr double kConstraintTol = 1e-8;

struct UnitPair {
  Vector x;
  Vector y;
  double value;
};

// Brings (x, y) onto the constraint set ||x|| = ||y|| = 1, ||x-y|| = eps.
// First by alternating chord rescaling and sphere normalization; if that
// stalls, by bisection along the great arc from x through y.
std::optional<UnitPair> project(const NormSpec& norm, Vector x, Vector y, double eps) {
  const double nx = evaluate(norm, x);
  if (!(nx > 0.0)) return std::nullopt;
  x /= nx;
  auto within = [&](const Vector& yy) {
    return std::abs(evaluate(norm, x - yy) - eps) <= kConstraintTol * eps;
  };
  bool ok = false;
  for (int it = 0; it < 60; ++it) {
    const Vector chord = y - x;
    const double c = evaluate(norm, chord);
    if (!(c > 0.0)) break;
    y = x + (eps / c) * chord;
    const double ny = evaluate(norm, y);
    if (!(ny > 0.0)) break;
    y /= ny;
    if (within(y)) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    const Vector xe = x / x.norm();
    Vector u = y - x;
    u -= u.dot(xe) * xe;
    if (!(u.norm() > 1e-300)) {
      u = Vector::Zero(x.size());
      Eigen::Index k = 0;
      xe.cwiseAbs().minCoeff(&k);
      u[k] = 1.0;
      u -= u.dot(xe) * xe;
    }
    u.normalize();
    auto point = [&](double theta) {
      Vector v = std::cos(theta) * xe + std::sin(theta) * u;
      return Vector(v / evaluate(norm, v));
    };
    double lo = 0.0, hi = std::numbers::pi;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (evaluate(norm, x - point(mid)) < eps ? lo : hi) = mid;
    }
    y = point(hi);
    if (!within(y)) return std::nullopt;
  }
  const double value = std::max(0.0, 1.0 - 0.5 * evaluate(norm, x + y));
  return UnitPair{std::move(x), std::move(y), value};
}

double search_one(const NormSpec& norm, double eps, const ModulusOptions& opt, std::uint64_t stream) {
  const int n = norm.dimension();
  auto rng = make_rng(opt.seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vec = [&] {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
  };

  // Coordinate-aligned starts reach flat faces and corners exactly.
  std::vector<std::pair<Vector, Vector>> starts;
  const Vector ones = Vector::Ones(n);
  for (int j = 0; j < n; ++j) {
    const Vector ej = Vector::Unit(n, j);
    const Vector x = ones / evaluate(norm, ones);
    starts.emplace_back(x, x - eps * ej / evaluate(norm, ej));
    const int k = (j + 1) % n;
    const Vector ek = Vector::Unit(n, k);
    const Vector xk = ek / evaluate(norm, ek);
    starts.emplace_back(xk, xk + eps * ej / evaluate(norm, ej));
  }
  for (int t = 0; t < opt.trials; ++t) starts.emplace_back(random_vec(), random_vec());

  double best = std::numeric_limits<double>::infinity();
  for (auto& [x0, y0] : starts) {
    auto current = project(norm, x0, y0, eps);
    if (!current) continue;
    best = std::min(best, current->value);
    double sigma = 0.3;
    for (int it = 0; it < opt.iterations && current->value > 0.0; ++it) {
      auto trial = project(norm, current->x + sigma * random_vec(), current->y + sigma * random_vec(), eps);
      if (trial && trial->value < current->value) {
        current = std::move(trial);
        sigma = std::min(1.0, sigma * 1.5);
      } else {
        sigma = std::max(1e-7, sigma * 0.8);
      }
    }
    best = std::min(best, current->value);
  }
  if (!std::isfinite(best)) throw NonConvergenceError("estimate_modulus: no feasible pair found");
  return best;
}

}  // namespace

ModulusProfile estimate_modulus(const NormSpec& norm, const std::vector<double>& eps_grid,
                                const ModulusOptions& options) {
  require(!eps_grid.empty(), "estimate_modulus: empty eps grid");
  require(norm.dimension() >= 2, "estimate_modulus: dimension must be at least 2");
  require(options.trials >= 1 && options.iterations >= 0, "estimate_modulus: bad trial counts");
  for (double e : eps_grid) require(e > 0.0 && e <= 2.0, "estimate_modulus: eps must lie in (0, 2]");

  std::vector<std::pair<double, double>> samples(eps_grid.size());
  parallel_for(eps_grid.size(), options.threads, [&](std::size_t i) {
    samples[i] = {eps_grid[i], search_one(norm, eps_grid[i], options, i)};
  });
  if (samples.size() == 1) {
    ModulusProfile profile;
    profile.samples = samples;
    profile.minorant = PiecewiseLinear({samples[0].first}, {samples[0].second});
    return profile;
  }
  return make_profile(std::move(samples));
}

void write_modulus_csv(std::ostream& os, const ModulusProfile& profile) {
  os << "eps,delta_hat,minorant,power_bound\n";
  os.precision(17);
  for (const auto& [eps, d] : profile.samples) {
    os << eps << ',' << d << ',' << profile.minorant(eps) << ',';
    if (profile.power_fit) os << profile.power_fit->K * std::pow(eps, profile.power_fit->p);
    os << '\n';
  }
}

}  // namespace qhgeo
