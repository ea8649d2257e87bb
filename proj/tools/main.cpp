#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "klm/errors.hpp"
#include "klm/experiments.hpp"

namespace {

const char* blurb(const std::string& name) {
  if (name == "ground-state") return "ground multiplet size, total spin and cutoff convergence";
  if (name == "correlations") return "ladder-pair sign table of sector ground states";
  if (name == "j-sweep") return "resolvent distance to the effective model along a J ladder";
  if (name == "nt-check") return "entrywise match of the effective model and the hole model";
  if (name == "magnetization") return "thermal magnetization of the hole model vs the tanh bound";
  if (name == "positivity") return "cone sign structure, heat-kernel positivity, ground vector";
  return "scalar path certificates connecting same-sector states";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-diagonalization workbench for a one-conduction-electron Kondo lattice "
               "coupled to phonons"};
  app.set_version_flag("--version", klm::version_string);

  std::string config_path, out_dir = ".", chosen;
  int threads = 1;
  bool check_only = false;
  const std::vector<std::string> experiments = {"ground-state", "correlations", "j-sweep",
                                                "nt-check",     "magnetization", "positivity",
                                                "ergodicity"};
  for (const auto& name : experiments) {
    auto* sub = app.add_subcommand(name, blurb(name));
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "artifact directory, created if missing");
    sub->add_option("--threads", threads, "worker threads for independent units")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--check-only", check_only, "validate config and assumptions, then exit");
    sub->callback([&chosen, name] { chosen = name; });
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  try {
    klm::RunConfig cfg = klm::parse_config_file(config_path);
    if (cfg.experiment != chosen)
      throw klm::ConfigError("config names experiment '" + cfg.experiment +
                             "' but the subcommand is '" + chosen + "'");
    klm::RunContext ctx{out_dir, threads, check_only};
    int rc = klm::run_experiment(cfg, ctx);
    if (check_only)
      std::cout << "config and assumptions ok\n";
    else if (rc == 0)
      std::cout << "all assertions passed; artifacts in " << out_dir << "\n";
    else
      std::cout << "assertion failures; see " << out_dir << "/manifest.json\n";
    return rc;
  } catch (const klm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const klm::AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const klm::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
}
