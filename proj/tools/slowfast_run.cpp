// Batch front end: one subcommand per experiment.
//
//   slowfast_run crossings --config configs/crossings.cfg --out-dir out/crossings
//   slowfast_run simulate --override epsilon=0.05 --override x0=0.3 --override y0=0
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 budget
// exhausted, 5 I/O error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slowfast/cli/config.hpp"
#include "slowfast/cli/output.hpp"
#include "slowfast/cli/run.hpp"

namespace sc = slowfast::cli;

int main(int argc, char** argv) {
  CLI::App app{"Slow-fast dynamics experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", slowfast::kVersion);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  for (const auto& [kind, name] : sc::kExperimentNames) {
    auto* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--out-dir", out_dir, "directory for outputs and manifest.json");
    sub->add_option("--override", overrides, "key=value, applied after the config (repeatable)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  sc::ExperimentConfig cfg;
  try {
    const std::string text = config_path.empty() ? std::string() : sc::read_file(config_path);
    std::vector<std::pair<std::string, std::string>> ov;
    for (const auto& o : overrides) ov.push_back(sc::parse_override(o));
    ov.emplace_back("experiment", experiment);
    cfg = sc::parse_config(text, ov);
  } catch (const slowfast::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sc::exit_code_for(e.kind()) == sc::kIo ? sc::kIo : sc::kConfig;
  }

  try {
    const auto manifest = sc::run(cfg, out_dir);
    std::cout << experiment << ": " << manifest.doc["status"].get<std::string>();
    if (const auto msg = manifest.doc["message"].get<std::string>(); !msg.empty())
      std::cout << " (" << msg << ")";
    std::cout << "\n";
    return manifest.exit_code;
  } catch (const slowfast::Error& e) {
    std::cerr << e.what() << "\n";
    return sc::exit_code_for(e.kind());
  }
}
