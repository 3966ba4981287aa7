#include "qhgeo/smooth.hpp"
#include "qhgeo/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace qhgeo;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

// Midpoint Riemann sum of gamma' over [t - h, t + h] clipped to [0, L].
Vector riemann_average(const Polyline& path, const NormSpec& norm, double t, double h, int n) {
  const auto cum = cumulative_norm_length(path, norm);
  const double lo = std::max(0.0, t - h), hi = std::min(cum.back(), t + h);
  Vector sum = Vector::Zero(path.dimension());
  for (int i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * (i + 0.5) / n;
    Eigen::Index j = 0;
    while (j + 2 < static_cast<Eigen::Index>(cum.size()) && cum[j + 1] <= s) ++j;
    const Vector d = path.vertex(j + 1) - path.vertex(j);
    sum += d / evaluate(norm, d);
  }
  return sum / n;
}

}  // namespace

TEST_CASE("moving average examples") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  const auto straight = Polyline::segment(v2(0, 0), v2(3, 4), 3);
  CHECK(moving_average(straight, norm, 2.0, 0.7).isApprox(v2(0.6, 0.8)));
  const auto corner = Polyline::from_points({v2(0, 0), v2(1, 0), v2(1, 1)});
  const Vector avg = moving_average(corner, norm, 1.0, 0.5);
  CHECK(avg.isApprox(v2(0.5, 0.5)));
  CHECK(avg.norm() == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(moving_average(corner, norm, 0.5, 1e-6).isApprox(v2(1, 0)));
  CHECK_THROWS_AS(moving_average(corner, norm, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(moving_average(corner, norm, 3.0, 0.1), InputError);
}

TEST_CASE("moving average agrees with a Riemann sum") {
  const auto norm = NormSpec::p_norm(2, 3.0);
  const auto path = Polyline::from_points({v2(0, 0), v2(0.3, 0.1), v2(0.5, 0.6), v2(1.2, 0.7), v2(1.3, 1.5)});
  const double L = norm_length(path, norm);
  for (double t : {0.1 * L, 0.37 * L, 0.5 * L, 0.81 * L})
    for (double h : {0.02, 0.1, 0.3}) {
      const Vector exact = moving_average(path, norm, t, h);
      const Vector riemann = riemann_average(path, norm, t, h, 10000);
      CHECK((exact - riemann).lpNorm<Eigen::Infinity>() <= 1e-8 + 2.0 * (2.0 * h) / 10000);
    }
}

TEST_CASE("dyadic ladder") {
  const auto l = dyadic_ladder();
  REQUIRE(l.size() == 7);
  CHECK(l[0] == 0.2);
  CHECK(l[6] == doctest::Approx(0.2 / 64));
  CHECK_THROWS_AS(dyadic_ladder(-1.0, 3), InputError);
}

TEST_CASE("straight geodesic has no deviation") {
  const auto domain = DomainSpec::half_space(NormSpec::sup(2), v2(0, 1), 0.0);
  const auto path = Polyline::segment(v2(0, 1), v2(0, 2), 64);
  const auto profile = smoothness_profile(path, domain, dyadic_ladder());
  for (double d : profile.sup_dev) CHECK(d <= 1e-9);
  CHECK_FALSE(profile.q.has_value());
  for (Eigen::Index i = 0; i < profile.gamma_prime.cols(); ++i)
    CHECK(evaluate(domain.norm(), Vector(profile.gamma_prime.col(i))) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("converged 2-norm half-plane geodesic decays") {
  const auto domain = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  const auto result = solve_geodesic(domain, v2(-1, 1), v2(1, 1));
  const auto profile = smoothness_profile(result.path, domain, dyadic_ladder());
  REQUIRE(profile.q.has_value());
  CHECK(*profile.q > 0.0);
  CHECK(profile.p_used.value_or(0.0) == 2.0);
  CHECK(profile.r_assumed == 1.0);
  CHECK(sup_dev_decreasing(profile));
  for (double d : profile.sup_dev) CHECK(d >= 0.0);
  std::ostringstream os;
  write_profile_csv(os, profile);
  CHECK(os.str().rfind("h,sup_dev,mu_hat\n", 0) == 0);
}

TEST_CASE("kinked control keeps its deviation") {
  const auto domain = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  const auto kinked = concatenate(Polyline::segment(v2(-1, 1), v2(0, 2), 1024), Polyline::segment(v2(0, 2), v2(1, 1), 1024));
  const auto profile = smoothness_profile(kinked, domain, dyadic_ladder(0.2, 10));
  int resolved = 0;
  for (std::size_t j = 0; j < profile.h_ladder.size(); ++j) {
    if (profile.h_ladder[j] < profile.kink_scale) continue;
    ++resolved;
    CHECK(profile.sup_dev[j] >= 1.0 - std::sqrt(2.0) / 2.0);
  }
  CHECK(resolved >= 7);
}

TEST_CASE("profile errors") {
  const auto domain = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  const auto path = Polyline::segment(v2(0, 1), v2(0, 2), 4);
  CHECK_THROWS_AS(smoothness_profile(path, domain, dyadic_ladder(), 0.6), InputError);
  CHECK_THROWS_AS(smoothness_profile(path, domain, {}), InputError);
}

TEST_CASE("distribution validation") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  CHECK_THROWS_AS(DiscreteUnitDistribution(norm, {v2(1, 1)}, {1.0}), InputError);
  CHECK_THROWS_AS(DiscreteUnitDistribution(norm, {v2(1, 0)}, {0.9}), InputError);
  CHECK_THROWS_AS(DiscreteUnitDistribution(norm, {v2(1, 0), v2(0, 1)}, {1.5, -0.5}), InputError);
  auto rng = make_rng(1, 2);
  const auto d = DiscreteUnitDistribution::random(norm, rng, 5);
  CHECK(d.atoms().size() <= 5);
  double total = 0.0;
  for (double p : d.probabilities()) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jensen lemma examples") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  const DiscreteUnitDistribution single(norm, {v2(0.6, 0.8)}, {1.0});
  for (auto phi : {ConvexTest::Norm, ConvexTest::NormSquared, ConvexTest::MaxCoordinate}) {
    const auto c = check_jensen_lemma(single, phi);
    CHECK(c.lhs == doctest::Approx(0.0));
    CHECK(c.rhs == doctest::Approx(0.0));
    CHECK(c.pass);
  }
  const DiscreteUnitDistribution pm(norm, {v2(1, 0), v2(-1, 0)}, {0.5, 0.5});
  const auto c = check_jensen_lemma(pm, ConvexTest::Norm);
  CHECK(c.lhs == doctest::Approx(1.0));
  CHECK(c.rhs == doctest::Approx(1.0));
  CHECK(c.pass);
}

TEST_CASE("jensen lemma on random distributions") {
  auto rng = make_rng(9, 0);
  for (int t = 0; t < 100; ++t) {
    const int dim = 2 + t % 3;
    const NormSpec norm = t % 2 ? NormSpec::p_norm(dim, 1.0 + t % 5) : NormSpec::sup(dim);
    const auto dist = DiscreteUnitDistribution::random(norm, rng);
    for (auto phi : {ConvexTest::Norm, ConvexTest::NormSquared, ConvexTest::MaxCoordinate})
      CHECK(check_jensen_lemma(dist, phi).pass);
  }
}

TEST_CASE("average norm lemma") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  const auto profile = euclidean_modulus_profile();
  const DiscreteUnitDistribution single(norm, {v2(0.6, 0.8)}, {1.0});
  const auto s = check_average_norm_lemma(single, profile);
  CHECK(s.lhs == doctest::Approx(1.0));
  CHECK(s.rhs == doctest::Approx(1.0));
  CHECK(s.pass);
  const DiscreteUnitDistribution pm(norm, {v2(1, 0), v2(-1, 0)}, {0.5, 0.5});
  const auto c = check_average_norm_lemma(pm, profile);
  CHECK(c.lhs == doctest::Approx(0.0));
  CHECK(c.rhs == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-3));
  CHECK(c.pass);
  auto rng = make_rng(10, 0);
  for (int t = 0; t < 100; ++t) CHECK(check_average_norm_lemma(DiscreteUnitDistribution::random(norm, rng), profile).pass);
}
