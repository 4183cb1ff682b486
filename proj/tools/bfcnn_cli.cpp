#include <CLI11.hpp>
#include <iostream>

#include "bfcnn/errors.hpp"
#include "bfcnn/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Phase-clocked biochemical FCNN simulator"};
  app.set_version_flag("--version", std::string(bfcnn::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  bool trace = false, emit_crn = false;
  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
    return sub;
  };
  auto* train = add("train", "one training run at a single T");
  train->add_flag("--trace", trace, "keep per-phase snapshots");
  train->add_flag("--emit-crn", emit_crn, "dump the blueprint CRN");
  auto* sweep = add("sweep", "training runs over a T grid with convergence fits");
  sweep->add_flag("--trace", trace, "keep per-phase snapshots");
  sweep->add_flag("--emit-crn", emit_crn, "dump the blueprint CRN");
  auto* simulate = add("simulate-module", "integrate one module or CRN file");
  auto* bounds = add("bounds", "evaluate the iteration error bound and envelope constants");
  auto* oracle = add("oracle-check", "integrator against closed forms");

  CLI11_PARSE(app, argc, argv);

  try {
    bfcnn::RunConfig cfg = bfcnn::load_config(config_path);
    cfg.trace = cfg.trace || trace;
    cfg.emit_crn = cfg.emit_crn || emit_crn;
    if (train->parsed()) return bfcnn::cmd_train(cfg, config_path);
    if (sweep->parsed()) return bfcnn::cmd_sweep(cfg, config_path);
    if (simulate->parsed()) return bfcnn::cmd_simulate_module(cfg, config_path);
    if (bounds->parsed()) return bfcnn::cmd_bounds(cfg, config_path);
    if (oracle->parsed()) return bfcnn::cmd_oracle_check(cfg, config_path);
  } catch (const bfcnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bfcnn::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
