#pragma once

#include "sconv/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace sconv {

enum class Command { verify_pathwise, verify_moments, solve, picard, stability };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command command);

/// Process exit codes of the runner.
namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int fail = 1;
inline constexpr int usage = 2;
inline constexpr int audit_failure = 3;
}  // namespace exit_code

struct CommandOutcome {
    int exit_code = exit_code::pass;
    /// Exactly the bytes written to summary.json.
    std::string summary_json;
};

/// Runs one command and writes config.json, summary.json and the CSV
/// tables under cfg.out_dir. Progress lines go to `log`.
///
/// The summary depends only on the configuration and the seed; the worker
/// count and timings never enter it. Throws ConfigError when the scenario
/// kind does not fit the command.
CommandOutcome run_command(Command command, const ExperimentConfig& cfg, std::ostream& log);

}  // namespace sconv
