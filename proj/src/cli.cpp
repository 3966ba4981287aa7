#include "qhgeo/cli.hpp"

#include "qhgeo/oracle.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace qhgeo {

namespace {

const Vector& need(const std::optional<Vector>& v, const char* key, const std::string& command) {
  if (!v) throw InputError("cli::" + command + ": option '" + key + "' is required");
  return *v;
}

SolverConfig solver_config(const RunConfig& config) {
  SolverConfig cfg = config.options.solver.value_or(SolverConfig{});
  cfg.seed = config.seed;
  return cfg;
}

Json geodesic_json(const GeodesicResult& r) {
  Json starts = Json::array();
  for (const auto& s : r.starts) starts.push_back({{"seed", s.seed}, {"length", s.length}});
  return Json{{"path", to_json(r.path)},
              {"qh_length", r.qh_length},
              {"bracket", {r.lower_bound, r.upper_bound}},
              {"converged", r.converged},
              {"starts", starts},
              {"round_lengths", r.round_lengths},
              {"iterations", r.iterations}};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

Json execute(const RunConfig& config, int& status, SvgScene* scene, std::string* csv) {
  status = kExitOk;
  const std::string& cmd = config.command;
  const auto& o = config.options;
  Json result;

  if (cmd == "distance" || cmd == "geodesic") {
    const DomainSpec domain = make_domain(config);
    const Vector& x = need(o.x, "x", cmd);
    const Vector& y = need(o.y, "y", cmd);
    const SolverConfig cfg = solver_config(config);
    const int starts = o.starts.value_or(1);
    require(starts >= 1, "cli::geodesic: starts must be positive");
    GeodesicResult best = solve_geodesic(domain, x, y, cfg);
    std::optional<UniquenessReport> probe;
    if (starts > 1) {
      probe = probe_uniqueness(domain, x, y, cfg, starts, config.threads);
      best.starts.clear();
      for (const auto& run : probe->runs) {
        best.starts.push_back(run.starts.front());
        if (run.qh_length < best.qh_length) {
          best.path = run.path;
          best.qh_length = run.qh_length;
        }
      }
    }
    if (cmd == "distance") {
      result = Json{{"qh_length", best.qh_length},
                    {"bracket", {best.lower_bound, best.upper_bound}},
                    {"converged", best.converged}};
    } else {
      result = geodesic_json(best);
      if (probe)
        result["uniqueness"] = Json{{"hausdorff_spread", probe->hausdorff_spread},
                                    {"length_spread", probe->length_spread},
                                    {"reference_norm_length", probe->reference_norm_length},
                                    {"unique_consistent", probe->unique_consistent},
                                    {"hausdorff_threshold", probe->hausdorff_threshold},
                                    {"length_threshold", probe->length_threshold}};
      if (csv) {
        std::ostringstream os;
        write_path_csv(os, best.path, domain);
        *csv = os.str();
      }
      if (scene) {
        if (probe)
          for (const auto& run : probe->runs) scene->paths.push_back(run.path);
        else
          scene->paths.push_back(best.path);
      }
    }
    if (!best.converged) status = kExitNonConvergence;
  } else if (cmd == "ball") {
    const DomainSpec domain = make_domain(config);
    if (!o.radius) throw InputError("cli::ball: option 'radius' is required");
    const auto sample = sample_qh_ball(domain, need(o.center, "center", cmd), *o.radius, o.directions.value_or(32),
                                       solver_config(config), config.threads);
    Json rays = Json::array();
    int ok = 0, truncated = 0, failed = 0;
    for (std::size_t i = 0; i < sample.status.size(); ++i) {
      rays.push_back({{"point", to_json(Vector(sample.points.col(static_cast<Eigen::Index>(i))))},
                      {"qh_dist", sample.qh_dist[i]},
                      {"status", to_string(sample.status[i])}});
      (sample.status[i] == RayStatus::Ok ? ok : sample.status[i] == RayStatus::Truncated ? truncated : failed)++;
    }
    result = Json{{"center", to_json(sample.center)},
                  {"radius", sample.radius},
                  {"rays", rays},
                  {"ok", ok},
                  {"truncated", truncated},
                  {"failed", failed}};
    if (csv) {
      std::ostringstream os;
      write_ball_csv(os, sample);
      *csv = os.str();
    }
    if (scene) scene->clouds.push_back(sample.points);
  } else if (cmd == "modulus") {
    if (!config.space) throw InputError("cli::modulus: 'space' is required");
    ModulusOptions mo;
    mo.trials = o.trials.value_or(mo.trials);
    mo.iterations = o.iterations.value_or(mo.iterations);
    mo.seed = config.seed;
    mo.threads = config.threads;
    const auto profile = estimate_modulus(*config.space, o.eps.value_or(default_eps_grid()), mo);
    Json samples = Json::array();
    for (const auto& [e, d] : profile.samples) samples.push_back({{"eps", e}, {"delta_hat", d}});
    result = Json{{"samples", samples}, {"power_fit", nullptr}};
    if (profile.power_fit) result["power_fit"] = Json{{"K", profile.power_fit->K}, {"p", profile.power_fit->p}};
    if (csv) {
      std::ostringstream os;
      write_modulus_csv(os, profile);
      *csv = os.str();
    }
  } else if (cmd == "certify") {
    std::vector<std::string> names = suite_names();
    if (o.suite) names = {*o.suite};
    result = Json::array();
    for (const auto& name : names) {
      const auto r = run_suite(name, config.seed, config.threads);
      result.push_back(
          {{"suite", r.suite}, {"instances", r.instances}, {"pass", r.pass}, {"worst_margin", r.worst_margin}});
      if (!r.pass) status = kExitCertificate;
    }
  } else if (cmd == "smooth") {
    const DomainSpec domain = make_domain(config);
    std::optional<Polyline> path = o.path;
    bool converged = true;
    if (!path) {
      const auto g = solve_geodesic(domain, need(o.x, "x", cmd), need(o.y, "y", cmd), solver_config(config));
      path = g.path;
      converged = g.converged;
    }
    const auto profile = smoothness_profile(*path, domain, dyadic_ladder(o.h0.value_or(0.2), o.h_count.value_or(7)),
                                            o.interior_margin.value_or(0.1));
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    result = Json{{"h", profile.h_ladder},
                  {"sup_dev", profile.sup_dev},
                  {"mu_hat", profile.mu_hat},
                  {"kink_scale", profile.kink_scale},
                  {"decreasing", sup_dev_decreasing(profile)},
                  {"fit", {{"C", opt(profile.C)}, {"q", opt(profile.q)}, {"r_assumed", profile.r_assumed},
                           {"p_used", opt(profile.p_used)}}}};
    if (csv) {
      std::ostringstream os;
      write_profile_csv(os, profile);
      *csv = os.str();
    }
    if (scene) scene->paths.push_back(*path);
    if (!converged) status = kExitNonConvergence;
  } else if (cmd == "oracle") {
    const DomainSpec domain = make_domain(config);
    GridOptions go;
    go.resolution = o.resolution.value_or(go.resolution);
    go.stencil_radius = o.stencil_radius.value_or(go.stencil_radius);
    go.margin = o.margin.value_or(go.margin);
    const auto r = grid_distance(domain, need(o.x, "x", cmd), need(o.y, "y", cmd), go);
    result = Json{{"distance", r.distance}, {"nodes", r.nodes}, {"edges", r.edges}};
  } else {
    throw InputError("cli: unknown command '" + cmd + "'");
  }
  return Json{{"command", cmd}, {"config", to_json(config)}, {"result", result}};
}

int run(const RunConfig& config, std::ostream& err) {
  try {
    int status = kExitOk;
    SvgScene scene;
    std::string csv;
    Json report = execute(config, status, &scene, &csv);
    report["meta"] = Json{{"tool", "qhgeo"}, {"timestamp", timestamp()}};
    {
      std::ofstream out(config.output + ".json");
      if (!out) throw InputError("cli: cannot write '" + config.output + ".json'");
      out << report.dump(2) << '\n';
    }
    if (!csv.empty()) std::ofstream(config.output + ".csv") << csv;
    if ((!scene.paths.empty() || !scene.clouds.empty()) && config.space && config.space->dimension() == 2)
      std::ofstream(config.output + ".svg") << render_svg(make_domain(config), scene);
    if (status == kExitNonConvergence) err << "qhgeo " << config.command << ": solver did not converge\n";
    if (status == kExitCertificate) err << "qhgeo certify: at least one suite failed\n";
    return status;
  } catch (const InputError& e) {
    err << "qhgeo " << config.command << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const UnsupportedError& e) {
    err << "qhgeo " << config.command << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const NonConvergenceError& e) {
    err << "qhgeo " << config.command << ": " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const NoPathError& e) {
    err << "qhgeo " << config.command << ": " << e.what() << '\n';
    return kExitNonConvergence;
  }
}

}  // namespace qhgeo
