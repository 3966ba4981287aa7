#include "qhgeo/norms.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qhgeo;

namespace {

Vector random_vector(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v;
}

// Lower bound on the dual norm by maximizing f.x over sampled unit vectors,
// then polishing the best one with a shrinking random-direction search.
double dual_lower_oracle(const NormSpec& norm, const Vector& f, std::mt19937_64& rng) {
  Vector best = random_vector(rng, norm.dimension());
  best /= evaluate(norm, best);
  double value = f.dot(best);
  for (int i = 0; i < 20000; ++i) {
    Vector u = random_vector(rng, norm.dimension());
    u /= evaluate(norm, u);
    if (f.dot(u) > value) {
      value = f.dot(u);
      best = u;
    }
  }
  for (double step = 0.1; step > 1e-9; step *= 0.7)
    for (int i = 0; i < 200; ++i) {
      Vector u = best + step * random_vector(rng, norm.dimension());
      u /= evaluate(norm, u);
      if (f.dot(u) > value) {
        value = f.dot(u);
        best = u;
      }
    }
  return value;
}

// max f.x over the c0-renorm unit ball, sliced by s = ||x||_inf: on each
// slice the box |x_i| <= s meets the ellipsoid sum w_i x_i^2 <= 1 - s^2 and
// the maximizer is x_i = sign(f_i) min(s, |f_i| / (mu w_i)). The slice value
// is concave in s.
double c0_dual_slices(const NormSpec& norm, const Vector& f) {
  const Vector& w = norm.renorm_weights();
  const Vector a = f.cwiseAbs();
  auto slice = [&](double s) {
    auto point = [&](double mu) { return Vector((a.array() / (mu * w.array())).min(s).matrix()); };
    const double budget = 1.0 - s * s;
    Vector x = Vector::Constant(a.size(), s);
    if ((w.array() * x.array().square()).sum() > budget) {
      double lo = 1e-300, hi = 1.0;
      while ((w.array() * point(hi).array().square()).sum() > budget) hi *= 2.0;
      for (int i = 0; i < 300; ++i) {
        const double mid = std::sqrt(lo * hi);
        ((w.array() * point(mid).array().square()).sum() > budget ? lo : hi) = mid;
      }
      x = point(hi);
    }
    return a.dot(x);
  };
  double lo = 0.0, hi = 1.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    (slice(m1) < slice(m2) ? lo : hi) = (slice(m1) < slice(m2) ? m1 : m2);
  }
  return slice(0.5 * (lo + hi));
}

}  // namespace

TEST_CASE("evaluate examples") {
  CHECK(evaluate(NormSpec::sup(2), Vector{{3.0, -4.0}}) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(evaluate(NormSpec::p_norm(2, 2.0), Vector{{3.0, 4.0}}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(evaluate(NormSpec::c0_renorm(2), Vector{{1.0, 0.0}}) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
  CHECK(evaluate(NormSpec::p_norm(3, INFINITY), Vector{{1.0, -7.0, 2.0}}) == 7.0);
}

TEST_CASE("evaluate rejects a dimension mismatch") {
  CHECK_THROWS_AS(evaluate(NormSpec::sup(3), Vector{{1.0, 2.0}}), InputError);
}

TEST_CASE("c0 renorm matches its defining formula") {
  std::mt19937_64 rng(5);
  for (int dim = 1; dim <= 8; ++dim) {
    const auto norm = NormSpec::c0_renorm(dim);
    for (int t = 0; t < 100; ++t) {
      const Vector x = random_vector(rng, dim);
      double sq = std::pow(x.cwiseAbs().maxCoeff(), 2);
      for (int n = 1; n <= dim; ++n) sq += std::ldexp(x[n - 1] * x[n - 1], -n);
      CHECK(evaluate(norm, x) * evaluate(norm, x) == doctest::Approx(sq).epsilon(1e-14));
    }
  }
}

TEST_CASE("norm axioms on random triples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(-5.0, 5.0);
  Matrix rows(3, 2);
  rows << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
  const std::vector<NormSpec> norms{NormSpec::p_norm(3, 1.0), NormSpec::p_norm(3, 2.0), NormSpec::p_norm(4, 3.5),
                                    NormSpec::sup(3),         NormSpec::c0_renorm(5),   NormSpec::table(rows)};
  for (const auto& norm : norms) {
    const int dim = norm.dimension();
    CHECK(evaluate(norm, Vector::Zero(dim)) == 0.0);
    for (int t = 0; t < 10000; ++t) {
      const Vector x = random_vector(rng, dim), y = random_vector(rng, dim);
      const double l = lam(rng);
      const double nx = evaluate(norm, x), ny = evaluate(norm, y);
      REQUIRE(nx > 0.0);
      REQUIRE(evaluate(norm, Vector(l * x)) == doctest::Approx(std::abs(l) * nx).epsilon(1e-12));
      REQUIRE(evaluate(norm, Vector(x + y)) <= (nx + ny) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("dual examples") {
  auto sup_dual = dual_evaluate(NormSpec::sup(3), Vector{{0.5, 0.25, 0.25}});
  CHECK(sup_dual.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(sup_dual.approximate);
  CHECK(dual_evaluate(NormSpec::p_norm(2, 2.0), Vector{{3.0, 4.0}}).value == doctest::Approx(5.0));
  CHECK(dual_evaluate(NormSpec::p_norm(2, 4.0), Vector{{1.0, 1.0}}).value == doctest::Approx(std::pow(2.0, 0.75)));
  CHECK(dual_evaluate(NormSpec::p_norm(2, 1.0), Vector{{1.0, -3.0}}).value == doctest::Approx(3.0));
}

TEST_CASE("dual agrees with a sampled primal maximization") {
  std::mt19937_64 rng(3);
  for (const auto& norm : {NormSpec::p_norm(3, 3.0), NormSpec::sup(3), NormSpec::p_norm(2, 1.5)}) {
    const Vector f = random_vector(rng, norm.dimension());
    const double exact = dual_evaluate(norm, f).value;
    const double lower = dual_lower_oracle(norm, f, rng);
    CHECK(lower <= exact * (1.0 + 1e-12));
    CHECK(lower == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("c0 renorm dual is a flagged upper estimate") {
  std::mt19937_64 rng(9);
  for (int dim : {2, 4, 6}) {
    const auto norm = NormSpec::c0_renorm(dim);
    for (int t = 0; t < 5; ++t) {
      const Vector f = random_vector(rng, dim);
      const auto dual = dual_evaluate(norm, f);
      CHECK(dual.approximate);
      CHECK(dual_lower_oracle(norm, f, rng) <= dual.value * (1.0 + 1e-9));
      const double exact = c0_dual_slices(norm, f);
      CHECK(exact <= dual.value * (1.0 + 1e-9));
      CHECK(dual.value <= exact * (1.0 + 1e-8));
    }
  }
}

TEST_CASE("table norms") {
  Matrix rows(2, 2);
  rows << 1.0, 0.0, 0.0, 1.0;
  const auto plain = NormSpec::table(rows);
  CHECK(evaluate(plain, Vector{{3.0, -4.0}}) == 4.0);
  CHECK_THROWS_AS(dual_evaluate(plain, Vector{{1.0, 1.0}}), UnsupportedError);
  Matrix dual(4, 2);
  dual << 1, 1, 1, -1, -1, 1, -1, -1;
  const auto with_dual = NormSpec::table(rows, dual);
  CHECK(dual_evaluate(with_dual, Vector{{0.5, -2.0}}).value == doctest::Approx(2.5));
  Matrix singular(2, 2);
  singular << 1.0, 1.0, 2.0, 2.0;
  CHECK_THROWS_AS(NormSpec::table(singular), InputError);
}

TEST_CASE("convexity flags") {
  CHECK(NormSpec::p_norm(2, 2.0).strictly_convex());
  CHECK(NormSpec::p_norm(2, 2.0).uniformly_convex());
  CHECK_FALSE(NormSpec::sup(2).strictly_convex());
  CHECK_FALSE(NormSpec::p_norm(2, 1.0).strictly_convex());
  CHECK(NormSpec::c0_renorm(4).strictly_convex());
  CHECK_THROWS_AS(NormSpec::p_norm(2, 0.5), InputError);
  CHECK_THROWS_AS(NormSpec::sup(0), InputError);
}
