#include "qhgeo/domains.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qhgeo;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

Vector gaussian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v;
}

// Nearest point of the hyperplane f.b = c to x by pattern search over the
// hyperplane: start at the Euclidean projection, then try random in-plane
// moves with a shrinking step.
double hyperplane_distance_oracle(const NormSpec& norm, const Vector& f, double c, const Vector& x,
                                  std::mt19937_64& rng) {
  Vector b = x - (f.dot(x) - c) / f.squaredNorm() * f;
  double best = evaluate(norm, Vector(x - b));
  for (double step = best; step > 1e-10 * (1.0 + best); step *= 0.8) {
    for (int i = 0; i < 60; ++i) {
      Vector dir = gaussian(rng, static_cast<int>(x.size()));
      dir -= dir.dot(f) / f.squaredNorm() * f;
      dir /= dir.norm();
      for (double sgn : {1.0, -1.0}) {
        const Vector trial = b + sgn * step * dir;
        const double value = evaluate(norm, Vector(x - trial));
        if (value < best) {
          best = value;
          b = trial;
        }
      }
    }
  }
  return best;
}

// Sup-norm distance to f.b = c: the cube x + t[-1,1]^n first touches the
// hyperplane at one of its vertices, so take the smallest contact time.
double cube_contact_oracle(const Vector& f, double c, const Vector& x) {
  const auto n = x.size();
  double best = INFINITY;
  for (long mask = 0; mask < (1L << n); ++mask) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    const double rate = f.dot(v);
    if (rate < 0.0) best = std::min(best, (f.dot(x) - c) / -rate);
  }
  return best;
}

}  // namespace

TEST_CASE("boundary distance examples") {
  const auto h2 = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  CHECK(boundary_distance(h2, v2(7, 3)) == doctest::Approx(3.0).epsilon(1e-15));
  const auto hs = DomainSpec::half_space(NormSpec::sup(2), v2(0, 1), 0.0);
  CHECK(boundary_distance(hs, v2(0, 1.5)) == doctest::Approx(1.5).epsilon(1e-15));
  const auto ball = DomainSpec::ball(NormSpec::p_norm(2, 2.0), v2(0, 0), 2.0);
  CHECK(boundary_distance(ball, v2(0, 0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("qh weight examples") {
  const auto h2 = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  CHECK(qh_weight(h2, v2(0, 2)) == doctest::Approx(0.5));
  const auto ball = DomainSpec::ball(NormSpec::p_norm(2, 2.0), v2(1, 1), 1.0);
  CHECK(qh_weight(ball, v2(1, 1)) == doctest::Approx(1.0));
  const auto punct = DomainSpec::punctured(NormSpec::p_norm(2, 2.0), v2(0, 0));
  CHECK(qh_weight(punct, v2(0, 3)) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("exterior points are rejected") {
  const auto h2 = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  CHECK_THROWS_AS(boundary_distance(h2, v2(0, 0)), ExteriorPointError);
  CHECK_THROWS_AS(qh_weight(h2, v2(0, -1)), ExteriorPointError);
  CHECK_FALSE(h2.contains(v2(3, -2)));
  CHECK(h2.signed_distance(v2(3, -2)) == doctest::Approx(-2.0));
  const auto punct = DomainSpec::punctured(NormSpec::sup(2), v2(1, 1));
  CHECK_THROWS_AS(boundary_distance(punct, v2(1, 1)), ExteriorPointError);
  CHECK_THROWS_AS(DomainSpec::ball(NormSpec::sup(2), v2(0, 0), -1.0), InputError);
  CHECK_THROWS_AS(DomainSpec::half_space(NormSpec::sup(2), v2(0, 0), 0.0), InputError);
}

TEST_CASE("polytope takes the min over faces") {
  const auto square = DomainSpec::polytope(NormSpec::p_norm(2, 2.0), {{v2(1, 0), 0.0}, {v2(-1, 0), -2.0},
                                                                      {v2(0, 1), 0.0}, {v2(0, -1), -2.0}});
  CHECK(boundary_distance(square, v2(1, 1)) == doctest::Approx(1.0));
  CHECK(boundary_distance(square, v2(0.25, 1.5)) == doctest::Approx(0.25));
  CHECK(square.is_convex());
  CHECK_FALSE(DomainSpec::punctured(NormSpec::sup(2), v2(0, 0)).is_convex());
}

TEST_CASE("table norm without a dual table cannot measure a face") {
  Matrix rows(2, 2);
  rows << 1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(DomainSpec::half_space(NormSpec::table(rows), v2(0, 1), 0.0).signed_distance(v2(0, 1)),
                  UnsupportedError);
}

TEST_CASE("boundary distance is 1-Lipschitz") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<DomainSpec> domains{
      DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0.3, 1.0), -0.5),
      DomainSpec::half_space(NormSpec::sup(2), v2(1.0, 1.0), 0.0),
      DomainSpec::ball(NormSpec::p_norm(2, 3.0), v2(0, 0), 3.0),
      DomainSpec::punctured(NormSpec::sup(2), v2(0.5, 0.5)),
      DomainSpec::polytope(NormSpec::p_norm(2, 1.0), {{v2(1, 0), -3.0}, {v2(0, 1), -3.0}, {v2(-1, -1), -3.0}}),
      DomainSpec::half_space(NormSpec::c0_renorm(2), v2(0.0, 1.0), -3.0)};
  for (const auto& domain : domains) {
    int pairs = 0;
    while (pairs < 10000) {
      const Vector x = v2(u(rng), u(rng)), y = v2(u(rng), u(rng));
      if (!domain.contains(x) || !domain.contains(y)) continue;
      ++pairs;
      const double gap = std::abs(boundary_distance(domain, x) - boundary_distance(domain, y));
      REQUIRE(gap <= evaluate(domain.norm(), Vector(x - y)) + 1e-10);
    }
  }
}

TEST_CASE("half-space distance matches a nearest-point search") {
  std::mt19937_64 rng(23);
  for (int dim = 2; dim <= 4; ++dim) {
    for (const auto& norm : {NormSpec::p_norm(dim, 2.0), NormSpec::sup(dim)}) {
      for (int t = 0; t < 4; ++t) {
        const Vector f = gaussian(rng, dim);
        const double c = 0.3;
        Vector x = gaussian(rng, dim);
        if (f.dot(x) <= c) x = -x + 2.0 * (c / f.squaredNorm()) * f;
        if (f.dot(x) <= c + 1e-3) continue;
        const auto domain = DomainSpec::half_space(norm, f, c);
        const double oracle = norm.kind() == NormKind::Sup ? cube_contact_oracle(f, c, x)
                                                           : hyperplane_distance_oracle(norm, f, c, x, rng);
        CHECK(boundary_distance(domain, x) == doctest::Approx(oracle).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("segment interiority") {
  const auto punct = DomainSpec::punctured(NormSpec::p_norm(2, 2.0), v2(0, 0));
  CHECK_FALSE(segment_is_interior(punct, v2(-1, 0), v2(1, 0)));
  CHECK(segment_is_interior(punct, v2(-1, 0.1), v2(1, 0.1)));
  const auto h2 = DomainSpec::half_space(NormSpec::p_norm(2, 2.0), v2(0, 1), 0.0);
  CHECK(segment_is_interior(h2, v2(-5, 1), v2(5, 0.01)));
  CHECK_FALSE(segment_is_interior(h2, v2(-5, 1), v2(5, -0.01)));
}
