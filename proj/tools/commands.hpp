#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sbpglue::cli {

/// Runs one CLI invocation. args excludes the program name. Returns the exit
/// code: 0 on success, the ErrorCode value of the failure otherwise, 1 for
/// acceptance checks that ran but did not pass (glue certificate).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbpglue::cli
