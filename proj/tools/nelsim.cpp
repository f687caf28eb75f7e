// nelsim command line: batch experiment driver.
//
//   nelsim run <config.json> [--output-dir D] [--seed S] [--quiet]
//
// Exit codes: 0 success, 2 invalid config, 3 numerical divergence.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nelsim/errors.hpp"
#include "nelsim/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nelsim: stochastic-mechanics simulation driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed_override = 0;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "execute the experiment in a config file");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--output-dir", output_dir,
                  "where to write results (overrides NELSIM_OUTPUT_DIR and the config)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed_override, "replace the seed from the config");
  run->add_flag("--quiet", quiet, "suppress progress output");

  CLI11_PARSE(app, argc, argv);

  try {
    nelsim::RunConfig cfg = nelsim::load_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    const std::string dir = nelsim::resolve_output_dir(cfg, output_dir);
    nelsim::run_experiment(cfg, dir, quiet);
  } catch (const nelsim::ConfigError& e) {
    std::cerr << "nelsim: " << e.what() << "\n";
    return 2;
  } catch (const nelsim::DivergenceError& e) {
    std::cerr << "nelsim: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "nelsim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
