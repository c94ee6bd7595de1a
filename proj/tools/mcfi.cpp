#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mcfi/commands.hpp"
#include "mcfi/csv.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Modal-centric field inversion for Burgers flows", "mcfi"};
  app.set_version_flag("--version", MCFI_VERSION);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<long long> seed;
  std::optional<double> threshold;
  const char* help[][2] = {
      {"forward", "Run the forward solver and write snapshots"},
      {"make-target", "Generate target modes, singular values and mean"},
      {"grad-check", "Compare adjoint and finite-difference gradients"},
      {"invert", "Minimize the objective within the design bounds"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Random seed (overrides seed)")->check(CLI::NonNegativeNumber);
    sub->add_option("--threshold", threshold, "Largest accepted relative gradient error")
        ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mcfi::kExitOk : mcfi::kExitConfig;
  }

  mcfi::KeyValues overrides;
  if (out_dir) overrides["output.dir"] = *out_dir;
  if (seed) overrides["seed"] = std::to_string(*seed);
  if (threshold) overrides["gradcheck.threshold"] = mcfi::format_double(*threshold);

  mcfi::RunConfig config;
  try {
    config = mcfi::load_run_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mcfi::kExitConfig;
  }
  return mcfi::run_command(app.get_subcommands().front()->get_name(), config, std::cout, std::cerr);
}
