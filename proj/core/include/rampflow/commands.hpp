#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "rampflow/config.hpp"

namespace rampflow {

enum class Command { simulate, sweep, stability, convergence, constants };

std::string_view to_string(Command command);
Command command_from_name(std::string_view name);

struct RunOptions {
  Command command = Command::simulate;
  std::filesystem::path out_dir = ".";
  std::size_t workers = 1;
};

/// Executes a command and writes its CSV outputs plus `metadata.json` and
/// `config.normalized.ini` into out_dir. Returns the process exit status;
/// errors are reported as one line on `err`.
int run_command(const ScenarioConfig& config, const RunOptions& options, std::ostream& out,
                std::ostream& err);

/// Single-line machine readable error: `error kind=<kind> message="<text>"`.
std::string format_error_line(const std::exception& error);
int exit_code_for(const std::exception& error);

/// Worker count from RAMPFLOW_WORKERS if set, otherwise `fallback`.
std::size_t workers_from_env(std::size_t fallback);

}  // namespace rampflow
