#include "qhgeo/oracle.hpp"

#include "qhgeo/paths.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace qhgeo {

namespace {
constexpr int kEdgeNodes = 4;
}  // namespace

GridGraph::GridGraph(const DomainSpec& domain, Vector lower, double spacing, int resolution, int stencil_radius)
    : domain_(domain), lower_(std::move(lower)), spacing_(spacing), resolution_(resolution), radius_(stencil_radius) {
  require(domain.dimension() == 2, "oracle::GridGraph: only 2D domains are supported");
  require(resolution >= 2, "oracle::GridGraph: resolution must be at least 2");
  require(stencil_radius >= 1, "oracle::GridGraph: stencil radius must be at least 1");
  require(std::isfinite(spacing) && spacing > 0.0, "oracle::GridGraph: spacing must be positive");
  for (int a = -stencil_radius; a <= stencil_radius; ++a)
    for (int b = -stencil_radius; b <= stencil_radius; ++b)
      if ((a != 0 || b != 0) && std::gcd(a, b) == 1) stencil_.emplace_back(a, b);

  const std::int64_t slots = static_cast<std::int64_t>(resolution) * resolution;
  interior_.assign(static_cast<std::size_t>(slots), 0);
  std::vector<double> weight(static_cast<std::size_t>(slots), 0.0);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const Vector p = node(i, j);
      if (domain.contains(p)) {
        interior_[index(i, j)] = 1;
        ++node_count_;
      }
    }

  const NormSpec& norm = domain.norm();
  const GaussRule& rule = gauss_legendre(kEdgeNodes);
  offsets_.assign(static_cast<std::size_t>(slots) + 1, 0);
  Vector mid(2), step(2);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const std::int64_t u = index(i, j);
      offsets_[u + 1] = offsets_[u];
      if (!interior_[u]) continue;
      const Vector p = node(i, j);
      for (const auto& [a, b] : stencil_) {
        const int i2 = i + a, j2 = j + b;
        if (i2 < 0 || j2 < 0 || i2 >= resolution || j2 >= resolution) continue;
        const std::int64_t v = index(i2, j2);
        if (!interior_[v]) continue;
        step << a * spacing_, b * spacing_;
        if (!domain.is_convex() && !segment_is_interior(domain, p, p + step)) continue;
        double w = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
          mid = p + rule.nodes[k] * step;
          w += rule.weights[k] / domain.signed_distance(mid);
        }
        if (!std::isfinite(w) || !(w > 0.0)) continue;
        targets_.push_back(v);
        weights_.push_back(evaluate(norm, step) * w);
        ++offsets_[u + 1];
      }
    }
  }
  edge_count_ = targets_.size() / 2;
}

GridGraph GridGraph::around(const DomainSpec& domain, const Vector& x, const Vector& y, const GridOptions& options) {
  require(domain.dimension() == 2, "oracle::grid_distance: only 2D domains are supported");
  require(x.size() == 2 && y.size() == 2, "oracle::grid_distance: endpoints must be 2D");
  require(options.margin > 0.0, "oracle::grid_distance: margin must be positive");
  const double scale =
      std::max({(x - y).lpNorm<Eigen::Infinity>(), boundary_distance(domain, x), boundary_distance(domain, y)});
  const double half = options.margin * scale;
  const Vector centre = 0.5 * (x + y);
  const Vector lower = centre.array() - half;
  return GridGraph(domain, lower, 2.0 * half / (options.resolution - 1), options.resolution, options.stencil_radius);
}

Vector GridGraph::node(int i, int j) const {
  Vector p(2);
  p << lower_[0] + i * spacing_, lower_[1] + j * spacing_;
  return p;
}

bool GridGraph::contains_point(const Vector& p) const {
  const Vector hi = upper();
  const double slack = 1e-12 * spacing_;
  return p.size() == 2 && (p.array() >= lower_.array() - slack).all() && (p.array() <= hi.array() + slack).all();
}

double GridGraph::shortest(const Vector& x, const Vector& y) const {
  require(contains_point(x) && contains_point(y), "oracle::grid_distance: endpoint outside the bounding box");
  boundary_distance(domain_, x);
  boundary_distance(domain_, y);
  const int reach = radius_;

  auto stubs = [&](const Vector& p) {
    std::unordered_map<std::int64_t, double> out;
    const int ci = static_cast<int>(std::lround((p[0] - lower_[0]) / spacing_));
    const int cj = static_cast<int>(std::lround((p[1] - lower_[1]) / spacing_));
    for (int j = cj - reach; j <= cj + reach; ++j)
      for (int i = ci - reach; i <= ci + reach; ++i) {
        if (i < 0 || j < 0 || i >= resolution_ || j >= resolution_ || !interior_[index(i, j)]) continue;
        const Vector q = node(i, j);
        if (!segment_is_interior(domain_, p, q)) continue;
        out[index(i, j)] = segment_qh_length(domain_, p, q);
      }
    return out;
  };
  const auto from = stubs(x);
  const auto to = stubs(y);
  if (from.empty() || to.empty()) throw NoPathError("oracle::grid_distance: an endpoint has no interior grid neighbour");

  const std::int64_t slots = static_cast<std::int64_t>(resolution_) * resolution_;
  const std::int64_t sink = slots;
  std::vector<double> dist(static_cast<std::size_t>(slots) + 1, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (const auto& [u, w] : from) {
    dist[u] = w;
    queue.emplace(w, u);
  }
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (du > dist[u]) continue;
    if (u == sink) return du;
    if (auto it = to.find(u); it != to.end() && du + it->second < dist[sink]) {
      dist[sink] = du + it->second;
      queue.emplace(dist[sink], sink);
    }
    for (std::int64_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      const double nd = du + weights_[e];
      if (nd < dist[targets_[e]]) {
        dist[targets_[e]] = nd;
        queue.emplace(nd, targets_[e]);
      }
    }
  }
  throw NoPathError("oracle::grid_distance: endpoints are not connected in the grid");
}

GridResult grid_distance(const DomainSpec& domain, const Vector& x, const Vector& y, const GridOptions& options) {
  const auto graph = GridGraph::around(domain, x, y, options);
  return {graph.shortest(x, y), graph.node_count(), graph.edge_count()};
}

}  // namespace qhgeo
