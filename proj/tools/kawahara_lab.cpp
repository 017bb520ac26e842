// Command-line driver: kawahara_lab <experiment> --config path.json [--set key=value]... [--out dir]

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kawahara/harness.hpp"

namespace h = kawahara::harness;

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral experiments for the periodic Kawahara equation"};
  app.set_version_flag("--version", std::string(h::tool_version));

  std::string experiment;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  app.add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(h::experiment_names()));
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override a config leaf by dotted path, key=value");
  app.add_option("--out", out_dir, "Output directory (overrides out_dir in the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : h::exit_config;
  }

  nlohmann::json doc = nlohmann::json::object();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      doc = nlohmann::json::parse(in);
    }
    for (const auto& o : overrides) h::apply_override(doc, o);
    if (!out_dir.empty()) doc["out_dir"] = out_dir;
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
    return h::exit_config;
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return h::exit_config;
  }

  h::RunResult result;
  try {
    result = h::run(h::resolve_config(experiment, doc));
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return h::exit_config;
  }
  if (result.exit_code != h::exit_ok) {
    std::cerr << result.message << '\n';
    return result.exit_code;
  }
  std::cout << result.summary.dump(2) << '\n';
  return 0;
}
