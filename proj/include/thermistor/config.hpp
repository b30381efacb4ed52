#pragma once

#include <filesystem>
#include <iosfwd>

#include "thermistor/physics.hpp"

namespace thermistor {

/// Reads a key = value problem description (INI sections). Keys that are
/// absent keep their Problem 1 values. See README for the schema.
ProblemSpec parse_problem_config(std::istream& in);
ProblemSpec load_problem_config(const std::filesystem::path& path);

}  // namespace thermistor
