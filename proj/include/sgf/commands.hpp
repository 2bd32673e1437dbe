#pragma once

#include "sgf/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sgf {

const std::vector<std::string>& command_names();

/// Runs one subcommand and fills `dir` with config echo, CSV tables, a JSON
/// summary and SVG plots. Returns the summary. Errors propagate as sgf::Error.
Json run_command(const std::string& name, const RunConfig& cfg, const std::string& dir, std::ostream& log);

}  // namespace sgf
