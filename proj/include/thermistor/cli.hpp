#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thermistor {

/// Entry point of the command-line front end; `args` excludes the program
/// name. Returns 0 on success, 1 on a runtime failure (solver, Picard,
/// I/O) and 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace thermistor
