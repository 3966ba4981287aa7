#pragma once

#include "qhgeo/certify.hpp"
#include "qhgeo/qh_ball.hpp"
#include "qhgeo/smooth.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qhgeo {

using Json = nlohmann::ordered_json;

// JSON forms:
//   norm   {"kind":"p","p":2,"dim":2} | {"kind":"sup","dim":3} | {"kind":"c0renorm","dim":8}
//          | {"kind":"table","rows":[[...]],"dual_rows":[[...]]}
//   domain {"kind":"halfspace","f":[0,1],"c":0} | {"kind":"ball","center":[..],"radius":r}
//          | {"kind":"punctured","point":[..]} | {"kind":"polytope","faces":[{"f":[..],"c":c},..]}
//   path   {"vertices":[[..],[..]]}
// Parsers reject unknown keys and throw InputError.
Json to_json(const NormSpec& norm);
NormSpec norm_from_json(const Json& j);

Json to_json(const DomainShape& shape);
DomainShape shape_from_json(const Json& j, int dimension);

Json to_json(const Polyline& path);
Polyline path_from_json(const Json& j);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);

Json to_json(const SolverConfig& config);
SolverConfig solver_from_json(const Json& j);

/// Command-specific options. Each command accepts only its own keys.
struct CommandOptions {
  std::optional<Vector> x;
  std::optional<Vector> y;
  std::optional<Polyline> path;
  std::optional<SolverConfig> solver;
  std::optional<int> starts;
  std::optional<Vector> center;
  std::optional<double> radius;
  std::optional<int> directions;
  std::optional<std::vector<double>> eps;
  std::optional<int> trials;
  std::optional<int> iterations;
  std::optional<std::string> suite;
  std::optional<double> h0;
  std::optional<int> h_count;
  std::optional<double> interior_margin;
  std::optional<int> resolution;
  std::optional<int> stencil_radius;
  std::optional<double> margin;
};

const std::vector<std::string>& command_names();

struct RunConfig {
  std::string command;
  std::optional<NormSpec> space;
  std::optional<DomainShape> domain;
  CommandOptions options;
  std::string output = "qhgeo";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);
/// Parses text; malformed JSON raises InputError carrying the parse location.
RunConfig parse_run_config(const std::string& text);

/// Domain assembled from space + domain; InputError when either is missing.
DomainSpec make_domain(const RunConfig& config);

/// Static SVG drawing of a 2D domain with optional paths and point clouds.
/// Other dimensions raise UnsupportedError.
struct SvgScene {
  std::vector<Polyline> paths;
  std::vector<Matrix> clouds;
};
std::string render_svg(const DomainSpec& domain, const SvgScene& scene);

}  // namespace qhgeo
