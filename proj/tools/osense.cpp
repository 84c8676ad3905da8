// osense: learn Hamiltonians, interaction graphs, and conserved operators of
// spin-1/2 Heisenberg systems from a handful of low-lying eigenstates.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "osense/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void attach_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", args.overrides,
                  "Override a config key (dotted path), e.g. --set stage2.max_iters=4000");
  sub->add_option("--out", args.out_dir, "Output directory (default from config)");
}

osense::RunConfig resolve_config(const CommonArgs& args, const std::string& mode) {
  osense::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = osense::config_from_json(
        nlohmann::json::parse(osense::read_text_file(args.config_path)));
  cfg.mode = mode;
  for (const auto& ov : args.overrides) osense::apply_override(cfg, ov);
  cfg.mode = mode;  // mode comes from the subcommand, not from overrides
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  osense::validate_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O-Sensing: operator learning from eigenstate moments"};
  app.require_subcommand(1);

  CommonArgs single_args, sweep_args, verify_args, lattice_args, extract_args;
  int crossover_nv = 14;
  std::string crossover_out;

  attach_common(app.add_subcommand("single", "Learn one ensemble of ER instances"), single_args);
  attach_common(app.add_subcommand("sweep", "Sweep over edge counts"), sweep_args);
  attach_common(app.add_subcommand("verify", "Check conserved-operator identities"), verify_args);
  attach_common(app.add_subcommand("lattice", "Run on a regular lattice"), lattice_args);
  attach_common(app.add_subcommand("extract", "Run with algebra generator extraction"),
                extract_args);
  auto* crossover = app.add_subcommand("crossover", "Sparsity duality crossover curve");
  crossover->add_option("--n-vertices", crossover_nv, "System size")->check(CLI::Range(2, 64));
  crossover->add_option("--out", crossover_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("single")) {
      const auto manifest = osense::run_single(resolve_config(single_args, "single"));
      std::cout << manifest["aggregate"].dump(2) << "\n";
    } else if (app.got_subcommand("sweep")) {
      const auto manifest = osense::run_sweep(resolve_config(sweep_args, "sweep"));
      std::cout << manifest["sweep"].dump(2) << "\n";
    } else if (app.got_subcommand("lattice")) {
      const auto manifest = osense::run_lattice(resolve_config(lattice_args, "lattice"));
      std::cout << manifest["aggregate"].dump(2) << "\n";
    } else if (app.got_subcommand("extract")) {
      const auto manifest = osense::run_extract(resolve_config(extract_args, "extract"));
      std::cout << manifest["aggregate"].dump(2) << "\n";
    } else if (app.got_subcommand("verify")) {
      const auto outcome = osense::run_verify(resolve_config(verify_args, "verify"));
      std::cout << outcome.report.dump(2) << "\n";
      if (!outcome.ok) {
        std::cerr << "verify: identity violations found\n";
        return 3;
      }
    } else if (app.got_subcommand("crossover")) {
      const auto j = osense::crossover_json(crossover_nv);
      if (!crossover_out.empty()) {
        std::filesystem::create_directories(crossover_out);
        osense::write_text_file(crossover_out + "/crossover.json", j.dump(2) + "\n");
      }
      std::cout << j.dump(2) << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
