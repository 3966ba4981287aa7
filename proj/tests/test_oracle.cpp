#include "qhgeo/oracle.hpp"
#include "qhgeo/paths.hpp"

#include <doctest.h>

#include <cmath>

using namespace qhgeo;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

DomainSpec upper(const NormSpec& norm) { return DomainSpec::half_space(norm, v2(0, 1), 0.0); }

}  // namespace

TEST_CASE("sup-norm radial distance within 2 percent") {
  const auto r = grid_distance(upper(NormSpec::sup(2)), v2(0, 1), v2(0, 2));
  CHECK(std::abs(r.distance - std::log(2.0)) <= 0.02 * std::log(2.0));
  CHECK(r.distance >= std::log(2.0) - 1e-9);
  CHECK(r.nodes > 0);
  CHECK(r.edges > 0);
}

TEST_CASE("2-norm half-plane against the hyperbolic distance") {
  const double exact = 2.0 * std::asinh(1.0);
  const auto r = grid_distance(upper(NormSpec::p_norm(2, 2.0)), v2(-1, 1), v2(1, 1));
  CHECK(r.distance >= exact - 1e-9);
  CHECK(r.distance <= exact * 1.02);
}

TEST_CASE("endpoints sharing a node reduce to stubs") {
  const auto domain = upper(NormSpec::p_norm(2, 2.0));
  const Vector x = v2(0.0, 1.0), y = v2(1e-4, 1.0);
  GridOptions opt;
  opt.resolution = 64;
  const auto r = grid_distance(domain, x, y, opt);
  const double direct = segment_qh_length(domain, x, y);
  CHECK(r.distance >= direct - 1e-12);
  CHECK(r.distance <= 4.0 * (2.0 / 63.0));
}

TEST_CASE("refinement trend") {
  for (const auto& norm : {NormSpec::p_norm(2, 2.0), NormSpec::sup(2)}) {
    const auto domain = upper(norm);
    double previous = INFINITY;
    for (int res : {64, 128, 256}) {
      GridOptions opt;
      opt.resolution = res;
      const double value = grid_distance(domain, v2(-0.7, 0.4), v2(1.1, 1.3), opt).distance;
      CHECK(value <= previous * (1.0 + 1e-3));
      previous = value;
    }
  }
}

TEST_CASE("punctured plane routes around the puncture") {
  const auto domain = DomainSpec::punctured(NormSpec::p_norm(2, 2.0), v2(0, 0));
  GridOptions opt;
  opt.resolution = 128;
  opt.margin = 1.5;
  const auto r = grid_distance(domain, v2(-1, 0), v2(1, 0), opt);
  CHECK(r.distance >= M_PI - 1e-9);
  CHECK(r.distance <= M_PI * 1.03);
}

TEST_CASE("oracle errors") {
  const auto domain = upper(NormSpec::p_norm(2, 2.0));
  CHECK_THROWS_AS(grid_distance(domain, v2(0, -1), v2(0, 1)), ExteriorPointError);
  const auto d3 = DomainSpec::half_space(NormSpec::p_norm(3, 2.0), Vector{{0.0, 0.0, 1.0}}, 0.0);
  CHECK_THROWS_AS(grid_distance(d3, Vector{{0.0, 0.0, 1.0}}, Vector{{0.0, 0.0, 2.0}}), InputError);
  GridOptions tiny;
  tiny.resolution = 1;
  CHECK_THROWS_AS(grid_distance(domain, v2(0, 1), v2(0, 2), tiny), InputError);
  const auto graph = GridGraph::around(domain, v2(0, 1), v2(0, 2), GridOptions{});
  CHECK_THROWS_AS(graph.shortest(v2(50, 1), v2(0, 2)), InputError);
}
