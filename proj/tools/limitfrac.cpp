// Command-line driver: run presets or config files, the Example 1
// convergence study, and a quick invariant self-check.

#include <CLI11.hpp>
#include <iostream>

#include "limitfrac/errors.hpp"
#include "limitfrac/experiments.hpp"
#include "limitfrac/mms.hpp"
#include "limitfrac/presets.hpp"
#include "verify.hpp"

namespace {

limitfrac::RunConfig resolve(const std::string& preset_name, const std::string& config_path,
                             const std::vector<std::string>& overrides) {
  if (preset_name.empty() == config_path.empty())
    throw limitfrac::ConfigError("give exactly one of --preset or --config");
  limitfrac::RunConfig cfg = preset_name.empty() ? limitfrac::load_config(config_path)
                                                 : limitfrac::preset(preset_name);
  for (const auto& o : overrides) limitfrac::apply_override(cfg, o);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"limitfrac: phase-field fracture with strain-limiting elasticity"};
  app.require_subcommand(1);

  std::string preset_name, config_path, out_dir;
  std::vector<std::string> overrides;
  int cycles = 0;

  auto* run = app.add_subcommand("run", "Run a preset or config file");
  run->add_option("--preset", preset_name, "Preset name (see `presets`)");
  run->add_option("--config", config_path, "Config file (section.key = value lines)");
  run->add_option("--out", out_dir, "Output directory (default: out/<name>)");
  run->add_option("--override", overrides, "section.key=value, repeatable");

  auto* converge = app.add_subcommand("converge", "Example 1 convergence table");
  converge->add_option("--preset", preset_name, "ex1_linear or ex1_nonlinear")->required();
  converge->add_option("--cycles", cycles, "Number of refinement cycles");
  converge->add_option("--override", overrides, "section.key=value, repeatable");

  auto* show = app.add_subcommand("show", "Print a preset's configuration");
  show->add_option("--preset", preset_name)->required();
  show->add_option("--override", overrides, "section.key=value, repeatable");

  app.add_subcommand("presets", "List preset names");
  app.add_subcommand("verify", "Run the invariant self-checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("presets")) {
      for (const auto& n : limitfrac::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (app.got_subcommand("verify")) return limitfrac::tools::verify(std::cout) ? 0 : 1;
    if (app.got_subcommand("show")) {
      std::cout << limitfrac::serialize_config(resolve(preset_name, "", overrides));
      return 0;
    }
    if (app.got_subcommand("converge")) {
      const auto cfg = resolve(preset_name, "", overrides);
      if (cfg.experiment != limitfrac::Experiment::ex1)
        throw limitfrac::ConfigError("converge needs an ex1 preset");
      const int n = cycles > 0 ? cycles : cfg.mms_cycles;
      std::cout << cfg.name << " (" << limitfrac::constitutive::to_string(cfg.model) << ")\n"
                << "cycle            h    cells     dofs           L2 error     rate\n";
      limitfrac::mms::convergence_study(cfg, n, &std::cout);
      return 0;
    }
    const auto cfg = resolve(preset_name, config_path, overrides);
    const std::string dir = out_dir.empty() ? "out/" + cfg.name : out_dir;
    return limitfrac::run_to_directory(cfg, dir, std::cout);
  } catch (const limitfrac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
