#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "tebd/cli/commands.hpp"
#include "tebd/cli/config.hpp"
#include "tebd/evolution.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string oracle;
  std::string resume;
  int threads = 0;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment configuration file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory (overrides output.directory)")
      ->envname("TEBD_OUT");
  cmd->add_option("--oracle", args.oracle, "Exact reference: none, dense or two-magnon")
      ->check(CLI::IsMember({"none", "dense", "two-magnon"}))
      ->envname("TEBD_ORACLE");
  cmd->add_option("--resume", args.resume, "Checkpoint file to continue from (quench only)");
  cmd->add_option("--threads", args.threads, "Intra-layer gate parallelism (default 1)")
      ->envname("TEBD_THREADS");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tebd: time evolution of one-dimensional quantum spin chains"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* ground = app.add_subcommand("ground", "Imaginary-time ground-state search");
  CLI::App* quench = app.add_subcommand("quench", "Real-time evolution with diagnostics");
  CLI::App* correlator =
      app.add_subcommand("correlator", "Dynamic correlator and structure factor");
  CLI::App* scaling = app.add_subcommand("scaling", "Wall-clock cost sweeps");
  for (CLI::App* cmd : {ground, quench, correlator, scaling}) attach_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  using namespace tebd::cli;
  try {
    ExperimentConfig cfg = load_config(args.config_path);
    if (!args.oracle.empty()) cfg.oracle = parse_oracle_name(args.oracle);
    if (const char* env_seed = std::getenv("TEBD_SEED")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env_seed, &end, 10);
      if (end == env_seed || *end != '\0')
        throw ConfigError("TEBD_SEED: expected a non-negative integer");
      cfg.seed = static_cast<uint64_t>(v);
    }

    RunOptions run;
    run.out_dir = args.out_dir.empty() ? cfg.output_directory : args.out_dir;
    if (run.out_dir.empty())
      throw ConfigError("no output directory: pass --out or set output.directory");
    run.resume_path = args.resume;
    run.threads = args.threads < 1 ? 1 : args.threads;

    if (ground->parsed()) return cmd_ground(cfg, run);
    if (quench->parsed()) return cmd_quench(cfg, run);
    if (correlator->parsed()) return cmd_correlator(cfg, run);
    return cmd_scaling(cfg, run);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const tebd::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
