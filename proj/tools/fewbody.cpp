// fewbody: batch front-end for symmetry-adapted exact diagonalization.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fewbody/cli.hpp"
#include "fewbody/errors.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Paths {
  std::string config;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace fewbody;
  CLI::App app{"Few-body exact diagonalization in 1D traps"};
  app.require_subcommand(1);

  struct Command {
    std::string name;
    std::string help;
    std::optional<cli::Analysis> analysis;  // nullopt: the config's list
  };
  const std::vector<Command> commands{
      {"spectrum", "per-sector spectra at each coupling", cli::Analysis::spectrum},
      {"sweep", "tracked levels across the coupling grid", cli::Analysis::sweep},
      {"stats", "unfolded level-spacing statistics", cli::Analysis::stats},
      {"entangle", "interparticle entanglement under time evolution", cli::Analysis::entangle},
      {"comrel", "centre-of-mass / relative separation checks", cli::Analysis::comrel},
      {"tps-check", "tensor-product-structure criteria for operator sets", cli::Analysis::tps_demo},
      {"run", "every analysis listed in the config", std::nullopt},
  };
  std::vector<Paths> paths(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
    sub->add_option("--config", paths[i].config, "JSON job configuration")->required();
    sub->add_option("--out", paths[i].out, "output directory (overrides the config)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      auto job = cli::load_config(paths[i].config);
      if (!paths[i].out.empty()) job.output = paths[i].out;
      std::optional<std::vector<cli::Analysis>> only;
      if (commands[i].analysis) only = std::vector<cli::Analysis>{*commands[i].analysis};
      const auto manifest = cli::run_job(job, only);
      for (const auto& f : manifest.files) std::cout << f.sha256 << "  " << f.name << "\n";
      std::cout << "wrote " << manifest.files.size() << " files and manifest.json to "
                << job.output.string() << "\n";
    }
  } catch (const ValidationError& e) {
    std::cerr << "fewbody: invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "fewbody: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
