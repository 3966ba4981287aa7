#include "qhgeo/io.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace qhgeo {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  if (!j.is_object()) throw InputError(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) throw InputError(context + ": unknown key '" + key + "'");
  }
}

const Json& need(const Json& j, const char* key, const std::string& context) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(context + ": missing key '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + ": expected an integer");
  return j.get<int>();
}

Matrix rows_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw InputError(what + ": rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw InputError(what + ": rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], what);
  }
  return m;
}

Json rows_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Json halfspace_json(const HalfSpace& h) { return Json{{"f", to_json(h.f)}, {"c", h.c}}; }

}  // namespace

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

Json to_json(const NormSpec& norm) {
  switch (norm.kind()) {
    case NormKind::P:
      return Json{{"kind", "p"}, {"p", norm.exponent()}, {"dim", norm.dimension()}};
    case NormKind::Sup:
      return Json{{"kind", "sup"}, {"dim", norm.dimension()}};
    case NormKind::C0Renorm:
      return Json{{"kind", "c0renorm"}, {"dim", norm.dimension()}};
    case NormKind::Table: {
      Json out{{"kind", "table"}, {"rows", rows_to_json(norm.table_rows())}};
      if (norm.dual_table_rows()) out["dual_rows"] = rows_to_json(*norm.dual_table_rows());
      return out;
    }
  }
  throw InputError("io: unknown norm kind");
}

NormSpec norm_from_json(const Json& j) {
  const std::string ctx = "io::norm";
  if (!j.is_object()) throw InputError(ctx + ": expected a JSON object");
  const Json& kind = need(j, "kind", ctx);
  if (!kind.is_string()) throw InputError(ctx + ": 'kind' must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "p") {
    check_keys(j, {"kind", "p", "dim"}, ctx);
    return NormSpec::p_norm(integer(need(j, "dim", ctx), ctx + ".dim"), number(need(j, "p", ctx), ctx + ".p"));
  }
  if (k == "sup") {
    check_keys(j, {"kind", "dim"}, ctx);
    return NormSpec::sup(integer(need(j, "dim", ctx), ctx + ".dim"));
  }
  if (k == "c0renorm") {
    check_keys(j, {"kind", "dim"}, ctx);
    return NormSpec::c0_renorm(integer(need(j, "dim", ctx), ctx + ".dim"));
  }
  if (k == "table") {
    check_keys(j, {"kind", "rows", "dual_rows"}, ctx);
    std::optional<Matrix> dual;
    if (j.contains("dual_rows")) dual = rows_from_json(j["dual_rows"], ctx + ".dual_rows");
    return NormSpec::table(rows_from_json(need(j, "rows", ctx), ctx + ".rows"), dual);
  }
  throw InputError(ctx + ": unknown kind '" + k + "'");
}

Json to_json(const DomainShape& shape) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfSpace>) {
          return Json{{"kind", "halfspace"}, {"f", to_json(s.f)}, {"c", s.c}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Json{{"kind", "ball"}, {"center", to_json(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Punctured>) {
          return Json{{"kind", "punctured"}, {"point", to_json(s.point)}};
        } else {
          Json faces = Json::array();
          for (const auto& f : s.faces) faces.push_back(halfspace_json(f));
          return Json{{"kind", "polytope"}, {"faces", faces}};
        }
      },
      shape);
}

DomainShape shape_from_json(const Json& j, int dimension) {
  const std::string ctx = "io::domain";
  if (!j.is_object()) throw InputError(ctx + ": expected a JSON object");
  const Json& kind = need(j, "kind", ctx);
  if (!kind.is_string()) throw InputError(ctx + ": 'kind' must be a string");
  const std::string k = kind.get<std::string>();
  auto vec = [&](const Json& v, const std::string& what) {
    Vector out = vector_from_json(v, what);
    if (out.size() != dimension) throw InputError(what + ": dimension does not match the space");
    return out;
  };
  if (k == "halfspace") {
    check_keys(j, {"kind", "f", "c"}, ctx);
    return HalfSpace{vec(need(j, "f", ctx), ctx + ".f"), number(need(j, "c", ctx), ctx + ".c")};
  }
  if (k == "ball") {
    check_keys(j, {"kind", "center", "radius"}, ctx);
    return Ball{vec(need(j, "center", ctx), ctx + ".center"), number(need(j, "radius", ctx), ctx + ".radius")};
  }
  if (k == "punctured") {
    check_keys(j, {"kind", "point"}, ctx);
    return Punctured{vec(need(j, "point", ctx), ctx + ".point")};
  }
  if (k == "polytope") {
    check_keys(j, {"kind", "faces"}, ctx);
    const Json& faces = need(j, "faces", ctx);
    if (!faces.is_array()) throw InputError(ctx + ".faces: expected an array");
    PolytopeIntersection poly;
    for (const auto& face : faces) {
      check_keys(face, {"f", "c"}, ctx + ".faces[]");
      poly.faces.push_back(
          {vec(need(face, "f", ctx), ctx + ".faces[].f"), number(need(face, "c", ctx), ctx + ".faces[].c")});
    }
    return poly;
  }
  throw InputError(ctx + ": unknown kind '" + k + "'");
}

Json to_json(const Polyline& path) { return Json{{"vertices", rows_to_json(path.vertices().transpose())}}; }

Polyline path_from_json(const Json& j) {
  check_keys(j, {"vertices"}, "io::path");
  return Polyline(rows_from_json(need(j, "vertices", "io::path"), "io::path.vertices").transpose());
}

Json to_json(const SolverConfig& c) {
  return Json{{"initial_vertices", c.initial_vertices},
              {"max_refinements", c.max_refinements},
              {"shrink", c.shrink},
              {"sufficient_decrease", c.sufficient_decrease},
              {"fd_step", c.fd_step},
              {"round_tol", c.round_tol},
              {"max_iterations", c.max_iterations},
              {"history", c.history},
              {"quadrature_points", c.quadrature_points},
              {"record_trace", c.record_trace}};
}

SolverConfig solver_from_json(const Json& j) {
  const std::string ctx = "io::solver";
  check_keys(j,
             {"initial_vertices", "max_refinements", "shrink", "sufficient_decrease", "fd_step", "round_tol",
              "max_iterations", "history", "quadrature_points", "record_trace"},
             ctx);
  SolverConfig c;
  auto get_int = [&](const char* key, int& out) {
    if (j.contains(key)) out = integer(j[key], ctx + "." + key);
  };
  auto get_num = [&](const char* key, double& out) {
    if (j.contains(key)) out = number(j[key], ctx + "." + key);
  };
  get_int("initial_vertices", c.initial_vertices);
  get_int("max_refinements", c.max_refinements);
  get_num("shrink", c.shrink);
  get_num("sufficient_decrease", c.sufficient_decrease);
  get_num("fd_step", c.fd_step);
  get_num("round_tol", c.round_tol);
  get_int("max_iterations", c.max_iterations);
  get_int("history", c.history);
  get_int("quadrature_points", c.quadrature_points);
  if (j.contains("record_trace")) {
    if (!j["record_trace"].is_boolean()) throw InputError(ctx + ".record_trace: expected a boolean");
    c.record_trace = j["record_trace"].get<bool>();
  }
  require(c.initial_vertices >= 3, ctx + ".initial_vertices: must be at least 3");
  require(c.max_refinements >= 0 && c.max_iterations >= 0 && c.history >= 1,
          ctx + ": counts must be non-negative (history positive)");
  require(c.shrink > 0.0 && c.shrink < 1.0, ctx + ".shrink: must lie in (0, 1)");
  require(c.sufficient_decrease > 0.0 && c.fd_step > 0.0 && c.round_tol > 0.0, ctx + ": tolerances must be positive");
  return c;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"distance", "geodesic", "ball", "modulus", "certify", "smooth", "oracle"};
  return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& option_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"distance", {"x", "y", "solver"}},
      {"geodesic", {"x", "y", "solver", "starts"}},
      {"ball", {"center", "radius", "directions", "solver"}},
      {"modulus", {"eps", "trials", "iterations"}},
      {"certify", {"suite"}},
      {"smooth", {"x", "y", "path", "solver", "h0", "h_count", "interior_margin"}},
      {"oracle", {"x", "y", "resolution", "stencil_radius", "margin"}},
  };
  return keys;
}

Json options_to_json(const CommandOptions& o) {
  Json j = Json::object();
  if (o.x) j["x"] = to_json(*o.x);
  if (o.y) j["y"] = to_json(*o.y);
  if (o.path) j["path"] = to_json(*o.path);
  if (o.solver) j["solver"] = to_json(*o.solver);
  if (o.starts) j["starts"] = *o.starts;
  if (o.center) j["center"] = to_json(*o.center);
  if (o.radius) j["radius"] = *o.radius;
  if (o.directions) j["directions"] = *o.directions;
  if (o.eps) j["eps"] = *o.eps;
  if (o.trials) j["trials"] = *o.trials;
  if (o.iterations) j["iterations"] = *o.iterations;
  if (o.suite) j["suite"] = *o.suite;
  if (o.h0) j["h0"] = *o.h0;
  if (o.h_count) j["h_count"] = *o.h_count;
  if (o.interior_margin) j["interior_margin"] = *o.interior_margin;
  if (o.resolution) j["resolution"] = *o.resolution;
  if (o.stencil_radius) j["stencil_radius"] = *o.stencil_radius;
  if (o.margin) j["margin"] = *o.margin;
  return j;
}

CommandOptions options_from_json(const Json& j, const std::string& command) {
  const std::string ctx = "io::options";
  if (!j.is_object()) throw InputError(ctx + ": expected a JSON object");
  const auto& allowed = option_keys().at(command);
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw InputError(ctx + ": unknown key '" + key + "' for command '" + command + "'");
  CommandOptions o;
  if (j.contains("x")) o.x = vector_from_json(j["x"], ctx + ".x");
  if (j.contains("y")) o.y = vector_from_json(j["y"], ctx + ".y");
  if (j.contains("path")) o.path = path_from_json(j["path"]);
  if (j.contains("solver")) o.solver = solver_from_json(j["solver"]);
  if (j.contains("starts")) o.starts = integer(j["starts"], ctx + ".starts");
  if (j.contains("center")) o.center = vector_from_json(j["center"], ctx + ".center");
  if (j.contains("radius")) o.radius = number(j["radius"], ctx + ".radius");
  if (j.contains("directions")) o.directions = integer(j["directions"], ctx + ".directions");
  if (j.contains("eps")) {
    const Vector e = vector_from_json(j["eps"], ctx + ".eps");
    o.eps = std::vector<double>(e.data(), e.data() + e.size());
  }
  if (j.contains("trials")) o.trials = integer(j["trials"], ctx + ".trials");
  if (j.contains("iterations")) o.iterations = integer(j["iterations"], ctx + ".iterations");
  if (j.contains("suite")) {
    if (!j["suite"].is_string()) throw InputError(ctx + ".suite: expected a string");
    o.suite = j["suite"].get<std::string>();
  }
  if (j.contains("h0")) o.h0 = number(j["h0"], ctx + ".h0");
  if (j.contains("h_count")) o.h_count = integer(j["h_count"], ctx + ".h_count");
  if (j.contains("interior_margin")) o.interior_margin = number(j["interior_margin"], ctx + ".interior_margin");
  if (j.contains("resolution")) o.resolution = integer(j["resolution"], ctx + ".resolution");
  if (j.contains("stencil_radius")) o.stencil_radius = integer(j["stencil_radius"], ctx + ".stencil_radius");
  if (j.contains("margin")) o.margin = number(j["margin"], ctx + ".margin");
  return o;
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json j{{"command", c.command}};
  if (c.space) j["space"] = to_json(*c.space);
  if (c.domain) j["domain"] = to_json(*c.domain);
  j["options"] = options_to_json(c.options);
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  const std::string ctx = "io::config";
  try {
    check_keys(j, {"command", "space", "domain", "options", "output", "seed", "threads"}, ctx);
    RunConfig c;
    const Json& cmd = need(j, "command", ctx);
    if (!cmd.is_string()) throw InputError(ctx + ".command: expected a string");
    c.command = cmd.get<std::string>();
    if (!option_keys().count(c.command)) throw InputError(ctx + ": unknown command '" + c.command + "'");
    if (j.contains("space")) c.space = norm_from_json(j["space"]);
    if (j.contains("domain")) {
      if (!c.space) throw InputError(ctx + ": 'domain' requires 'space'");
      c.domain = shape_from_json(j["domain"], c.space->dimension());
    }
    if (j.contains("options")) c.options = options_from_json(j["options"], c.command);
    if (j.contains("output")) {
      if (!j["output"].is_string()) throw InputError(ctx + ".output: expected a string");
      c.output = j["output"].get<std::string>();
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
        throw InputError(ctx + ".seed: expected a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("threads")) {
      const int t = integer(j["threads"], ctx + ".threads");
      require(t >= 1, ctx + ".threads: must be positive");
      c.threads = static_cast<unsigned>(t);
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(ctx + ": " + e.what());
  }
}

RunConfig parse_run_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("io::config: malformed JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

DomainSpec make_domain(const RunConfig& config) {
  if (!config.space) throw InputError("io::config: command '" + config.command + "' needs 'space'");
  if (!config.domain) throw InputError("io::config: command '" + config.command + "' needs 'domain'");
  return DomainSpec(*config.space, *config.domain);
}

std::string render_svg(const DomainSpec& domain, const SvgScene& scene) {
  if (domain.dimension() != 2) throw UnsupportedError("io::render_svg: only 2D domains can be drawn");
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  auto grow = [&](const Eigen::Ref<const Vector>& p) {
    lo = lo.cwiseMin(Eigen::Vector2d(p[0], p[1]));
    hi = hi.cwiseMax(Eigen::Vector2d(p[0], p[1]));
  };
  for (const auto& path : scene.paths)
    for (Eigen::Index i = 0; i < path.size(); ++i) grow(path.vertex(i));
  for (const auto& cloud : scene.clouds)
    for (Eigen::Index i = 0; i < cloud.cols(); ++i) grow(cloud.col(i));

  std::vector<std::pair<Vector, Vector>> lines;
  std::vector<Vector> outline;
  std::optional<Vector> marker;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        auto add_face = [&](const HalfSpace& h) {
          const Vector p0 = h.c * h.f / h.f.squaredNorm();
          const Vector dir{{-h.f[1], h.f[0]}};
          lines.emplace_back(p0, dir / dir.norm());
        };
        if constexpr (std::is_same_v<T, HalfSpace>) {
          add_face(s);
        } else if constexpr (std::is_same_v<T, PolytopeIntersection>) {
          for (const auto& f : s.faces) add_face(f);
        } else if constexpr (std::is_same_v<T, Ball>) {
          for (int i = 0; i <= 256; ++i) {
            const double a = 2.0 * std::numbers::pi * i / 256;
            const Vector u{{std::cos(a), std::sin(a)}};
            outline.push_back(s.center + s.radius * u / evaluate(domain.norm(), u));
            grow(outline.back());
          }
        } else {
          marker = s.point;
          grow(s.point);
        }
      },
      domain.shape());
  if (!std::isfinite(lo[0])) {
    lo.setConstant(-1.0);
    hi.setConstant(1.0);
  }
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-9});
  lo.array() -= 0.1 * span;
  hi.array() += 0.1 * span;
  const double size = 600.0;
  const double scale = size / std::max(hi[0] - lo[0], hi[1] - lo[1]);
  const double width = (hi[0] - lo[0]) * scale, height = (hi[1] - lo[1]) * scale;
  auto px = [&](double x) { return (x - lo[0]) * scale; };
  auto py = [&](double y) { return (hi[1] - y) * scale; };

  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double reach = 10.0 * (hi - lo).norm();
  for (const auto& [p0, dir] : lines) {
    const Vector a = p0 - reach * dir, b = p0 + reach * dir;
    os << "<line x1=\"" << px(a[0]) << "\" y1=\"" << py(a[1]) << "\" x2=\"" << px(b[0]) << "\" y2=\"" << py(b[1])
       << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  if (!outline.empty()) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (const auto& p : outline) os << px(p[0]) << ',' << py(p[1]) << ' ';
    os << "\"/>\n";
  }
  if (marker) os << "<circle cx=\"" << px((*marker)[0]) << "\" cy=\"" << py((*marker)[1]) << "\" r=\"4\" fill=\"black\"/>\n";
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  for (std::size_t k = 0; k < scene.paths.size(); ++k) {
    os << "<polyline fill=\"none\" stroke=\"" << colours[k % 6] << "\" stroke-width=\"1.5\" points=\"";
    const auto& path = scene.paths[k];
    for (Eigen::Index i = 0; i < path.size(); ++i) os << px(path.vertex(i)[0]) << ',' << py(path.vertex(i)[1]) << ' ';
    os << "\"/>\n";
  }
  for (const auto& cloud : scene.clouds)
    for (Eigen::Index i = 0; i < cloud.cols(); ++i)
      os << "<circle cx=\"" << px(cloud(0, i)) << "\" cy=\"" << py(cloud(1, i)) << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace qhgeo
