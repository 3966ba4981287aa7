#include "qhgeo/paths.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace qhgeo;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

DomainSpec upper(const NormSpec& norm) { return DomainSpec::half_space(norm, v2(0, 1), 0.0); }

// Closed-form QH length of a straight segment in the upper half-plane:
// speed * |log(b_y / a_y)| / |b_y - a_y| per unit of the y-increment.
double halfplane_segment(const NormSpec& norm, const Vector& a, const Vector& b) {
  const double speed = evaluate(norm, Vector(b - a));
  if (std::abs(b[1] - a[1]) < 1e-15) return speed / a[1];
  return speed * std::log(b[1] / a[1]) / (b[1] - a[1]);
}

Polyline random_path(std::mt19937_64& rng, const Vector& lo, const Vector& hi, int vertices) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> pts;
  for (int i = 0; i < vertices; ++i) {
    Vector p(lo.size());
    for (Eigen::Index k = 0; k < lo.size(); ++k) p[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
    pts.push_back(p);
  }
  return Polyline::from_points(pts);
}

}  // namespace

TEST_CASE("norm length examples") {
  CHECK(norm_length(Polyline::from_points({v2(0, 0), v2(3, 4)}), NormSpec::p_norm(2, 2.0)) == 5.0);
  const auto tent = Polyline::from_points({v2(0, 1), v2(0.5, 1.5), v2(0, 2)});
  CHECK(norm_length(tent, NormSpec::sup(2)) == doctest::Approx(1.0).epsilon(1e-15));
  const auto triangle = Polyline::from_points({v2(0, 0), v2(1, 0), v2(0, 2), v2(0, 0)});
  CHECK(norm_length(triangle, NormSpec::p_norm(2, 2.0)) == doctest::Approx(3.0 + std::sqrt(5.0)));
  const auto cum = cumulative_norm_length(triangle, NormSpec::p_norm(2, 1.0));
  CHECK(cum == std::vector<double>{0.0, 1.0, 4.0, 6.0});
}

TEST_CASE("polyline validation") {
  CHECK_THROWS_AS(Polyline::from_points({v2(0, 0)}), InputError);
  CHECK_THROWS_AS(Polyline::from_points({v2(0, 0), v2(0, 0), v2(1, 1)}), InputError);
  const auto seg = Polyline::segment(v2(0, 0), v2(1, 2), 4);
  CHECK(seg.size() == 5);
  CHECK(seg.vertex(2).isApprox(v2(0.5, 1.0)));
  CHECK(seg.reversed().front().isApprox(v2(1, 2)));
}

TEST_CASE("qh length examples") {
  const auto sup = upper(NormSpec::sup(2));
  CHECK(qh_length(Polyline::from_points({v2(0, 1), v2(0, 2)}), sup) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const auto tent = Polyline::from_points({v2(0, 1), v2(0.5, 1.5), v2(0, 2)});
  CHECK(qh_length(tent, sup) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(qh_length(tent, upper(NormSpec::p_norm(2, 2.0))) ==
        doctest::Approx(std::sqrt(2.0) * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("qh length matches the closed form on random half-plane paths") {
  std::mt19937_64 rng(2);
  const auto norm = NormSpec::p_norm(2, 3.0);
  const auto domain = upper(norm);
  for (int t = 0; t < 50; ++t) {
    const auto path = random_path(rng, v2(-2, 0.05), v2(2, 3), 6);
    double exact = 0.0;
    for (Eigen::Index i = 0; i + 1 < path.size(); ++i) exact += halfplane_segment(norm, path.vertex(i), path.vertex(i + 1));
    CHECK(qh_length(path, domain) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("qh length errors") {
  const auto domain = upper(NormSpec::p_norm(2, 2.0));
  CHECK_THROWS_AS(qh_length(Polyline::from_points({v2(0, 1), v2(0, -1)}), domain), ExteriorPointError);
  const auto punct = DomainSpec::punctured(NormSpec::p_norm(2, 2.0), v2(0, 0));
  CHECK_THROWS_AS(qh_length(Polyline::from_points({v2(-1, 0), v2(1, 0)}), punct), ExteriorPointError);
  try {
    qh_length(Polyline::from_points({v2(0, 1), v2(1, 1), v2(1, -1)}), domain);
    FAIL("expected an exterior-point error");
  } catch (const ExteriorPointError& e) {
    CHECK(std::string(e.what()).find("segment 1") != std::string::npos);
  }
}

TEST_CASE("concatenation is additive") {
  std::mt19937_64 rng(4);
  const auto domain = DomainSpec::ball(NormSpec::p_norm(2, 2.0), v2(0, 0), 1.0);
  for (int t = 0; t < 50; ++t) {
    const auto p1 = random_path(rng, v2(-0.6, -0.6), v2(0.6, 0.6), 4);
    auto pts = std::vector<Vector>{p1.back()};
    const auto tail = random_path(rng, v2(-0.6, -0.6), v2(0.6, 0.6), 3);
    for (Eigen::Index i = 0; i < tail.size(); ++i) pts.push_back(tail.vertex(i));
    const auto p2 = Polyline::from_points(pts);
    const double joined = qh_length(concatenate(p1, p2), domain);
    CHECK(joined == doctest::Approx(qh_length(p1, domain) + qh_length(p2, domain)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(concatenate(Polyline::segment(v2(0, 0), v2(1, 0)), Polyline::segment(v2(2, 0), v2(3, 0))), InputError);
}

TEST_CASE("qh length dominates the log ratio of boundary distances") {
  std::mt19937_64 rng(6);
  const auto half = upper(NormSpec::sup(2));
  const auto ball = DomainSpec::ball(NormSpec::p_norm(2, 1.5), v2(0, 0), 2.0);
  for (int t = 0; t < 1000; ++t) {
    const bool use_ball = t % 2 == 1;
    const auto& domain = use_ball ? ball : half;
    const auto path = use_ball ? random_path(rng, v2(-1.1, -1.1), v2(1.1, 1.1), 5)
                               : random_path(rng, v2(-3, 0.01), v2(3, 4), 5);
    const double bound = std::abs(std::log(boundary_distance(domain, path.front()) / boundary_distance(domain, path.back())));
    REQUIRE(qh_length(path, domain) >= bound - 1e-12);
  }
}

TEST_CASE("doubling the quadrature order leaves converged lengths unchanged") {
  std::mt19937_64 rng(8);
  const auto domain = DomainSpec::ball(NormSpec::c0_renorm(3), Vector::Zero(3), 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto path = random_path(rng, Vector::Constant(3, -0.45), Vector::Constant(3, 0.45), 6);
    QuadratureOptions doubled;
    doubled.points_per_segment = 16;
    CHECK(qh_length(path, domain, doubled) == doctest::Approx(qh_length(path, domain)).epsilon(1e-8));
  }
}

TEST_CASE("reparameterize by arclength") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  const auto r = reparameterize_arclength(Polyline::from_points({v2(0, 0), v2(0, 1)}), norm, 3);
  REQUIRE(r.size() == 3);
  CHECK(r.vertex(1).isApprox(v2(0, 0.5)));
  const auto corner = reparameterize_arclength(Polyline::from_points({v2(0, 0), v2(1, 0), v2(1, 1)}), norm, 5);
  CHECK((corner.vertex(2) - v2(1, 0)).norm() < 1e-14);
  CHECK(norm_length(corner, norm) == doctest::Approx(2.0).epsilon(1e-10));

  std::vector<Vector> arc;
  for (int i = 0; i < 16; ++i) {
    const double a = 0.5 * M_PI * i / 15.0;
    arc.push_back(v2(std::cos(a), std::sin(a)));
  }
  const auto quarter = Polyline::from_points(arc);
  const auto resampled = reparameterize_arclength(quarter, norm, 16);
  double lo = INFINITY, hi = 0.0;
  for (Eigen::Index i = 0; i + 1 < resampled.size(); ++i) {
    const double chord = (resampled.vertex(i + 1) - resampled.vertex(i)).norm();
    lo = std::min(lo, chord);
    hi = std::max(hi, chord);
  }
  CHECK(hi / lo < 1.01);
  CHECK(norm_length(resampled, norm) == doctest::Approx(norm_length(quarter, norm)).epsilon(1e-10));
  for (Eigen::Index i = 0; i < resampled.size(); ++i) {
    double best = INFINITY;
    for (Eigen::Index j = 0; j + 1 < quarter.size(); ++j)
      best = std::min(best, point_segment_distance(norm, resampled.vertex(i), quarter.vertex(j), quarter.vertex(j + 1)));
    CHECK(best < 1e-12);
  }
  CHECK_THROWS_AS(reparameterize_arclength(quarter, norm, 1), InputError);
}

TEST_CASE("qh proportional resampling") {
  const auto domain = upper(NormSpec::p_norm(2, 2.0));
  const auto path = Polyline::from_points({v2(0, 1), v2(0, 4)});
  const auto r = resample_qh_proportional(path, domain, 3);
  CHECK(r.vertex(1)[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("average paths") {
  const auto p1 = Polyline::from_points({v2(0, 1), v2(0, 1.5), v2(0, 2)});
  const auto p2 = Polyline::from_points({v2(0, 1), v2(0.5, 1.5), v2(0, 2)});
  CHECK(average_paths(p1, p2, 0.0).vertices() == p1.vertices());
  CHECK(average_paths(p1, p2, 1.0).vertices() == p2.vertices());
  CHECK(average_paths(p1, p2, 0.5).vertex(1).isApprox(v2(0.25, 1.5)));
  CHECK(average_paths(p2, p2, 0.5).vertices().isApprox(p2.vertices()));
  CHECK_THROWS_AS(average_paths(p1, Polyline::from_points({v2(0, 1), v2(0, 2)}), 0.5), InputError);
  CHECK_THROWS_AS(average_paths(p1, p2, 1.5), InputError);
}

TEST_CASE("averaging is convex for convex domains") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> s_dist(0.0, 1.0);
  const auto domain = DomainSpec::ball(NormSpec::p_norm(2, 2.0), v2(0, 0), 1.0);
  for (int t = 0; t < 100; ++t) {
    auto p1 = random_path(rng, v2(-0.6, -0.6), v2(0.6, 0.6), 5);
    auto p2 = random_path(rng, v2(-0.6, -0.6), v2(0.6, 0.6), 5);
    Matrix v2m = p2.vertices();
    v2m.col(0) = p1.front();
    v2m.col(4) = p1.back();
    p2 = Polyline(v2m);
    p1 = resample_qh_proportional(p1, domain, 21);
    p2 = resample_qh_proportional(p2, domain, 21);
    const double s = s_dist(rng);
    const double lhs = qh_length(average_paths(p1, p2, s), domain);
    CHECK(lhs <= s * qh_length(p2, domain) + (1 - s) * qh_length(p1, domain) + 1e-6);
  }
}

TEST_CASE("weighted length") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  const auto path = Polyline::from_points({v2(0, 1), v2(0, 2)});
  const WeightFunction inv = [](const Vector& x) { return 1.0 / x[1]; };
  CHECK(weighted_length(path, norm, inv) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const WeightFunction one = [](const Vector&) { return 1.0; };
  CHECK(weighted_length(path, norm, one) == doctest::Approx(1.0));
  const WeightFunction bad = [](const Vector&) { return -1.0; };
  CHECK_THROWS_AS(weighted_length(path, norm, bad), InputError);
}

TEST_CASE("hausdorff distance") {
  const auto norm = NormSpec::p_norm(2, 2.0);
  const auto a = Polyline::from_points({v2(0, 0), v2(1, 0)});
  const auto b = Polyline::from_points({v2(0, 1), v2(1, 1)});
  CHECK(hausdorff_distance(a, b, norm) == doctest::Approx(1.0));
  CHECK(hausdorff_distance(a, a, norm) == 0.0);
  CHECK(max_vertex_separation(a, b, norm) == doctest::Approx(1.0));
}

TEST_CASE("path csv") {
  std::ostringstream os;
  write_path_csv(os, Polyline::from_points({v2(0, 1), v2(0, 2)}), upper(NormSpec::sup(2)));
  CHECK(os.str().rfind("index,x0,x1,cum_norm_len,cum_qh_len\n", 0) == 0);
}
