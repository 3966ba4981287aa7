#include "qhgeo/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace qhgeo {

namespace {

constexpr int kGridPoints = 512;

struct Segments {
  std::vector<double> cum;
  Matrix dirs;
  // Column j holds the integral of gamma' over [0, cum[j]].
  Matrix prefix;
  double total = 0.0;
};

Segments unit_segments(const Polyline& path, const NormSpec& norm) {
  Segments s;
  s.cum = cumulative_norm_length(path, norm);
  s.total = s.cum.back();
  if (!(s.total > 0.0)) throw InputError("smooth: path has zero length");
  s.dirs.resize(path.dimension(), path.segment_count());
  for (Eigen::Index j = 0; j < path.segment_count(); ++j) {
    const Vector d = path.vertex(j + 1) - path.vertex(j);
    s.dirs.col(j) = d / (s.cum[j + 1] - s.cum[j]);
  }
  s.prefix.resize(path.dimension(), path.size());
  s.prefix.col(0).setZero();
  for (Eigen::Index j = 0; j < path.segment_count(); ++j)
    s.prefix.col(j + 1) = s.prefix.col(j) + (s.cum[j + 1] - s.cum[j]) * s.dirs.col(j);
  return s;
}

Eigen::Index segment_right_of(const Segments& s, double t) {
  const auto k = std::upper_bound(s.cum.begin(), s.cum.end(), t) - s.cum.begin() - 1;
  return std::clamp<Eigen::Index>(k, 0, s.dirs.cols() - 1);
}

Vector integral_to(const Segments& s, double t) {
  const Eigen::Index j = segment_right_of(s, t);
  return s.prefix.col(j) + (t - s.cum[j]) * s.dirs.col(j);
}

Vector window_mean(const Segments& s, double a, double b) {
  return (integral_to(s, b) - integral_to(s, a)) / (b - a);
}

}  // namespace

Vector moving_average(const Polyline& path, const NormSpec& norm, double t, double h) {
  require(std::isfinite(h) && h > 0.0, "smooth::moving_average: h must be positive");
  const Segments s = unit_segments(path, norm);
  require(t >= 0.0 && t <= s.total, "smooth::moving_average: t outside the parameter range");
  const double a = std::max(0.0, t - h);
  const double b = std::min(s.total, t + h);
  if (!(b > a)) throw InputError("smooth::moving_average: empty averaging window");
  return window_mean(s, a, b);
}

std::vector<double> dyadic_ladder(double h0, int count) {
  require(h0 > 0.0 && count >= 1, "smooth::dyadic_ladder: invalid ladder");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out[j] = std::ldexp(h0, -j);
  return out;
}

DerivativeProfile smoothness_profile(const Polyline& path, const DomainSpec& domain,
                                     const std::vector<double>& h_ladder, double interior_margin) {
  require(interior_margin > 0.0 && interior_margin < 0.5, "smooth::smoothness_profile: margin must lie in (0, 1/2)");
  require(!h_ladder.empty(), "smooth::smoothness_profile: empty h ladder");
  for (double h : h_ladder) require(std::isfinite(h) && h > 0.0, "smooth::smoothness_profile: h must be positive");
  require(path.dimension() == domain.dimension(), "smooth::smoothness_profile: dimension mismatch");
  const NormSpec& norm = domain.norm();
  const Segments s = unit_segments(path, norm);
  const double lo = interior_margin * s.total;
  const double hi = (1.0 - interior_margin) * s.total;

  std::vector<double> mids;
  std::vector<Eigen::Index> mid_segment;
  for (Eigen::Index j = 0; j < s.dirs.cols(); ++j) {
    const double m = 0.5 * (s.cum[j] + s.cum[j + 1]);
    if (m >= lo && m <= hi) {
      mids.push_back(m);
      mid_segment.push_back(j);
    }
  }
  if (mids.empty()) throw InputError("smooth::smoothness_profile: path too short for the interior margin");

  DerivativeProfile out;
  out.h_ladder = h_ladder;
  out.t_grid.resize(kGridPoints);
  out.gamma_prime.resize(path.dimension(), kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    const double t = lo + (hi - lo) * i / (kGridPoints - 1);
    auto it = std::lower_bound(mids.begin(), mids.end(), t);
    std::size_t k = static_cast<std::size_t>(it - mids.begin());
    if (k == mids.size() || (k > 0 && t - mids[k - 1] <= mids[k] - t)) --k;
    out.t_grid[i] = mids[k];
    out.gamma_prime.col(i) = s.dirs.col(mid_segment[k]);
  }

  for (Eigen::Index j = 0; j < s.dirs.cols(); ++j)
    out.kink_scale = std::max(out.kink_scale, s.cum[j + 1] - s.cum[j]);

  for (double h : h_ladder) {
    Matrix th(path.dimension(), kGridPoints);
    double dev = 0.0, mu = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridPoints; ++i) {
      const double t = out.t_grid[i];
      const double a = std::max(0.0, t - h);
      const double b = std::min(s.total, t + h);
      th.col(i) = window_mean(s, a, b);
      dev = std::max(dev, evaluate(norm, th.col(i) - out.gamma_prime.col(i)));
      const Vector chord = point_at_arclength(path, norm, b) - point_at_arclength(path, norm, a);
      mu = std::max(mu, 1.0 - evaluate(norm, chord) / (b - a));
    }
    for (std::size_t k = 0; k < mids.size(); ++k) {
      const double t = mids[k];
      const Vector mean = window_mean(s, std::max(0.0, t - h), std::min(s.total, t + h));
      dev = std::max(dev, evaluate(norm, mean - s.dirs.col(mid_segment[k])));
    }
    out.moving_averages.push_back(std::move(th));
    out.sup_dev.push_back(dev);
    out.mu_hat.push_back(mu);
  }

  std::vector<double> lx, ly;
  out.fitted.assign(h_ladder.size(), false);
  for (std::size_t j = 0; j < h_ladder.size(); ++j) {
    if (h_ladder[j] >= out.kink_scale && out.sup_dev[j] > 0.0) {
      out.fitted[j] = true;
      lx.push_back(std::log(h_ladder[j]));
      ly.push_back(std::log(out.sup_dev[j]));
    }
  }
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx > 0.0) {
      const double q = sxy / sxx;
      double logc = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lx.size(); ++i) logc = std::max(logc, ly[i] - q * lx[i]);
      out.q = q;
      out.C = std::exp(logc);
    }
  }
  if (norm.kind() == NormKind::P && std::isfinite(norm.exponent()) && norm.exponent() > 1.0)
    out.p_used = std::max(2.0, norm.exponent());
  return out;
}

bool sup_dev_decreasing(const DerivativeProfile& profile, double slack) {
  // The ladder is decreasing in h, so sup_dev must not grow along it.
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < profile.sup_dev.size(); ++j) {
    if (!(profile.h_ladder[j] >= profile.kink_scale)) continue;
    if (profile.sup_dev[j] > prev + slack) return false;
    prev = profile.sup_dev[j];
  }
  return true;
}

void write_profile_csv(std::ostream& os, const DerivativeProfile& profile) {
  os << "h,sup_dev,mu_hat\n";
  os.precision(17);
  for (std::size_t j = 0; j < profile.h_ladder.size(); ++j)
    os << profile.h_ladder[j] << ',' << profile.sup_dev[j] << ',' << profile.mu_hat[j] << '\n';
}

DiscreteUnitDistribution::DiscreteUnitDistribution(NormSpec norm, std::vector<Vector> atoms,
                                                   std::vector<double> probabilities)
    : norm_(std::move(norm)), atoms_(std::move(atoms)), probs_(std::move(probabilities)) {
  require(!atoms_.empty(), "smooth::DiscreteUnitDistribution: no atoms");
  require(atoms_.size() == probs_.size(), "smooth::DiscreteUnitDistribution: atom and probability counts differ");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    require(atoms_[i].size() == norm_.dimension(), "smooth::DiscreteUnitDistribution: atom dimension mismatch");
    require(std::abs(evaluate(norm_, atoms_[i]) - 1.0) <= 1e-12, "smooth::DiscreteUnitDistribution: atom is not unit");
    require(probs_[i] >= 0.0, "smooth::DiscreteUnitDistribution: negative probability");
    total += probs_[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "smooth::DiscreteUnitDistribution: probabilities do not sum to 1");
}

DiscreteUnitDistribution DiscreteUnitDistribution::random(const NormSpec& norm, std::mt19937_64& rng,
                                                          int max_atoms) {
  require(max_atoms >= 1, "smooth::DiscreteUnitDistribution: max_atoms must be positive");
  std::uniform_int_distribution<int> count(1, max_atoms);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const int n = count(rng);
  std::vector<Vector> atoms;
  std::vector<double> probs;
  for (int i = 0; i < n; ++i) {
    Vector u(norm.dimension());
    do {
      for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = gauss(rng);
    } while (!(u.norm() > 1e-9));
    atoms.push_back(u / evaluate(norm, u));
    probs.push_back(expo(rng) + 1e-3);
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return DiscreteUnitDistribution(norm, std::move(atoms), std::move(probs));
}

Vector DiscreteUnitDistribution::mean() const {
  Vector m = Vector::Zero(norm_.dimension());
  for (std::size_t i = 0; i < atoms_.size(); ++i) m += probs_[i] * atoms_[i];
  return m;
}

double DiscreteUnitDistribution::mean_pair_distance() const {
  double e = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = 0; j < atoms_.size(); ++j) e += probs_[i] * probs_[j] * evaluate(norm_, atoms_[i] - atoms_[j]);
  return e;
}

std::string to_string(ConvexTest phi) {
  switch (phi) {
    case ConvexTest::Norm:
      return "norm";
    case ConvexTest::NormSquared:
      return "norm_squared";
    case ConvexTest::MaxCoordinate:
      return "max_coordinate";
  }
  return "norm";
}

LemmaCheck check_jensen_lemma(const DiscreteUnitDistribution& dist, ConvexTest phi) {
  const NormSpec& norm = dist.norm();
  auto f = [&](const Vector& v) {
    switch (phi) {
      case ConvexTest::Norm:
        return evaluate(norm, v);
      case ConvexTest::NormSquared: {
        const double n = evaluate(norm, v);
        return n * n;
      }
      case ConvexTest::MaxCoordinate:
        return v.maxCoeff();
    }
    return 0.0;
  };
  const auto& x = dist.atoms();
  const auto& p = dist.probabilities();
  const Vector m = dist.mean();
  LemmaCheck out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.lhs += p[i] * f(x[i] - m);
    for (std::size_t j = 0; j < x.size(); ++j) out.rhs += p[i] * p[j] * f(x[i] - x[j]);
  }
  out.pass = out.lhs <= out.rhs + 1e-12;
  return out;
}

LemmaCheck check_average_norm_lemma(const DiscreteUnitDistribution& dist, const ModulusProfile& profile) {
  require(!profile.minorant.empty(), "smooth::check_average_norm_lemma: profile has no minorant");
  const double e = dist.mean_pair_distance();
  const auto& mino = profile.minorant;
  double delta = 0.0;
  if (e >= mino.lower()) delta = mino(std::min(e, mino.upper()));
  LemmaCheck out;
  out.lhs = evaluate(dist.norm(), dist.mean());
  out.rhs = 1.0 - delta;
  out.pass = out.lhs <= out.rhs + 1e-6;
  if (!out.pass && out.lhs <= out.rhs + 1e-3) out.note = "estimator artifact";
  return out;
}

ModulusProfile euclidean_modulus_profile() {
  std::vector<std::pair<double, double>> samples;
  for (double e : default_eps_grid()) samples.emplace_back(e, 1.0 - std::sqrt(1.0 - e * e / 4.0));
  return make_profile(std::move(samples));
}

}  // namespace qhgeo
