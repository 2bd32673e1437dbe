#include "sgf/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace sgf;
  CLI::App app{"second-grade fluid control workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, nu;
  std::optional<Index> m;
  app.add_option("--config", config_path, "TOML configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out, "run directory (overrides output)");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--seed", seed, "PRNG seed");
  app.add_option("--alpha", alpha, "alpha for single solves");
  app.add_option("--nu", nu, "viscosity");
  app.add_option("--m", m, "number of modes");

  const std::vector<std::pair<std::string, std::string>> help{
      {"mesh", "generate the mesh and report statistics"},
      {"eig", "compute (or load) the slip-Stokes eigenbasis"},
      {"state", "solve the state equation for the configured control"},
      {"gateaux", "Taylor remainder study of the control-to-state map"},
      {"control", "solve the optimal control problem at one alpha"},
      {"sweep", "vanishing-alpha study with warm starts"},
      {"idlab", "identity suite and domain constants"},
      {"constants", "Poincare, Sobolev and Korn constants"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg = config_path.empty() ? RunConfig::defaults() : load_config(config_path);
    if (!out.empty()) cfg.out = out;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    if (alpha) cfg.alpha = *alpha;
    if (nu) cfg.nu = *nu;
    if (m) {
      cfg.m = *m;
      if (cfg.target.kind == TargetSpec::Kind::coefficients && cfg.target.coefficients.size() > cfg.m)
        cfg.target.coefficients.conservativeResize(cfg.m);
      cfg.idlab.modes = std::min(cfg.idlab.modes, cfg.m);
    }
    cfg.validate();
    const Json summary = run_command(command, cfg, cfg.out, std::cerr);
    std::cout << summary.dump(2) << "\n";
    std::cerr << "wrote " << cfg.out << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
