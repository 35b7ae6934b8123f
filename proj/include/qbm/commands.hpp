#pragma once

// Subcommands of the qbmsim front end. Each prints a `key = value` table
// to `out` and writes data files under RunConfig::out.

#include <iosfwd>
#include <string>
#include <vector>

#include "qbm/run_config.hpp"

namespace qbm {

void cmd_sql(const RunConfig& rc, std::ostream& out);
void cmd_simulate(const RunConfig& rc, std::ostream& out);
void cmd_detect(const RunConfig& rc, std::ostream& out);
void cmd_first_order(const RunConfig& rc, std::ostream& out);
void cmd_scale_hbar(const RunConfig& rc, std::ostream& out);

/// Parses `args` (without the program name) and runs one subcommand.
/// Returns the process exit status; failures end with a single
/// `error: <key>: <reason>` line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qbm
