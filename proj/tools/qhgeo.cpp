#include "qhgeo/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"Quasihyperbolic distances and geodesics in normed spaces"};
  std::string command, config_file, out, suite;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("command", command, "distance | geodesic | ball | modulus | certify | smooth | oracle");
  app.add_option("--config", config_file, "JSON run configuration");
  auto* out_opt = app.add_option("--out", out, "Output path prefix");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* suite_opt = app.add_option("--suite", suite, "certify: run a single suite");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? qhgeo::kExitOk : qhgeo::kExitInput;
  }

  qhgeo::RunConfig config;
  try {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw qhgeo::InputError("cannot read config '" + config_file + "'");
      std::stringstream ss;
      ss << in.rdbuf();
      config = qhgeo::parse_run_config(ss.str());
      if (!command.empty() && command != config.command)
        throw qhgeo::InputError("command '" + command + "' does not match config command '" + config.command + "'");
    } else {
      if (command.empty()) throw qhgeo::InputError("a command or --config is required");
      config = qhgeo::run_config_from_json(qhgeo::Json{{"command", command}});
    }
    if (*out_opt) config.output = out;
    if (*seed_opt) config.seed = seed;
    if (*threads_opt) config.threads = threads;
    if (*suite_opt) {
      if (config.command != "certify") throw qhgeo::InputError("--suite applies only to certify");
      config.options.suite = suite;
    }
  } catch (const qhgeo::Error& e) {
    std::cerr << "qhgeo: " << e.what() << '\n';
    return qhgeo::kExitInput;
  }
  return qhgeo::run(config, std::cerr);
}
