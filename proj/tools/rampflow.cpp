#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "rampflow/commands.hpp"
#include "rampflow/config.hpp"
#include "rampflow/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal traffic flow simulator with on- and off-ramps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_name;
  std::string out_dir = ".";
  std::optional<std::size_t> workers;

  const std::pair<rampflow::Command, const char*> commands[] = {
      {rampflow::Command::simulate, "Run one simulation and write snapshots and diagnostics"},
      {rampflow::Command::sweep, "Sweep the merge-look offset delta"},
      {rampflow::Command::stability, "Paired runs measuring L1 sensitivity to one input"},
      {rampflow::Command::convergence, "Grid self-convergence study"},
      {rampflow::Command::constants, "Print the a-priori estimate constants"},
  };
  for (const auto& [command, help] : commands) {
    auto* sub = app.add_subcommand(std::string(rampflow::to_string(command)), help);
    sub->add_option("scenario", scenario_name, "Bundled scenario name or config path");
    sub->add_option("--config", config_path, "Scenario config file");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads (default: RAMPFLOW_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
  }
  app.add_subcommand("list", "List bundled scenarios");

  CLI11_PARSE(app, argc, argv);
  auto* chosen = app.get_subcommands().front();
  if (chosen->get_name() == "list") {
    for (auto name : rampflow::bundled_scenario_names()) std::cout << name << '\n';
    return 0;
  }

  try {
    if (config_path.empty() == scenario_name.empty()) {
      throw rampflow::ConfigError("", "give exactly one of --config <path> or a scenario name");
    }
    rampflow::RunOptions options;
    options.command = rampflow::command_from_name(chosen->get_name());
    options.out_dir = out_dir;
    options.workers = workers ? *workers : rampflow::workers_from_env(1);
    const auto config = config_path.empty() ? rampflow::load_config(scenario_name)
                                            : rampflow::parse_config(config_path);
    return rampflow::run_command(config, options, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << rampflow::format_error_line(e) << '\n';
    return rampflow::exit_code_for(e);
  }
}
