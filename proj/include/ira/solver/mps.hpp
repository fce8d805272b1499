#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "ira/solver/linear_program.hpp"

namespace ira::solver {

/// Fixed-format MPS. Rows are named R0000000.., columns C0000000.., the objective COST.
/// Binary columns are wrapped in MARKER INTORG/INTEND pairs and every column gets
/// explicit bounds. Numbers use at most 12 characters, which keeps 8 to 12 significant
/// digits depending on sign and magnitude.
void write_mps(const MilpProblem& problem, std::ostream& out, const std::string& name = "IRA");
void write_mps(const MilpProblem& problem, const std::filesystem::path& path, const std::string& name = "IRA");

/// Shortest `%g` rendering of `v` that fits the 12-character MPS numeric field.
std::string mps_number(double v);

}  // namespace ira::solver
