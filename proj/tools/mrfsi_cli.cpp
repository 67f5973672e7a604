#include "mrfsi/runner.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

namespace {

struct Command {
  const char* name;
  const char* help;
  std::optional<mrfsi::ExperimentKind> kind;  // empty keeps the config's experiment
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multirate heat/wave interface solver experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string log_level = "info";
  std::optional<std::uint64_t> seed;

  const Command commands[] = {
      {"solve", "Primal solve with the configured decoupler", mrfsi::ExperimentKind::primal},
      {"compare-decouplers", "Relaxation vs shooting evaluation counts per macro step",
       mrfsi::ExperimentKind::decoupler_compare},
      {"convergence", "Uniform refinement study with error estimates", mrfsi::ExperimentKind::convergence},
      {"adapt", "Goal-oriented adaptive time refinement", mrfsi::ExperimentKind::adaptive},
      {"render-mesh", "SVG diagram of the uniform time partition", mrfsi::ExperimentKind::render},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
    subs.emplace_back(sub, &c);
  }
  app.add_option("--out", out_dir, "Output directory (overrides out_dir)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_option("--seed", seed, "Random seed recorded in the report");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    mrfsi::RunConfig cfg = mrfsi::parse_config(config_path);
    for (const auto& [sub, cmd] : subs)
      if (sub->parsed() && cmd->kind) cfg.experiment = *cmd->kind;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) cfg.seed = *seed;
    const mrfsi::RunReport report = mrfsi::run_experiment(cfg);
    mrfsi::emit_reports(report, cfg.out_dir);
    spdlog::info("reports written to {}", cfg.out_dir);
  } catch (const mrfsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
