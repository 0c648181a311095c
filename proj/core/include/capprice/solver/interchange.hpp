#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "capprice/solver/branch_bound.hpp"
#include "capprice/solver/model_ir.hpp"

namespace capprice::solver {

/// Line-oriented text form of a ModelIR:
///
///   CAPPRICE-IR 1
///   VARS n          then n lines: name lb ub
///   ROWS m          then m lines: name E|L|G rhs tag k var coef ... (k pairs)
///   CONES c         then c lines: name bound tag k var coef ...
///   SOS1 s          then s lines: name k var ...
///   OBJ constant k  then k lines: var coef
///   QUAD q          then q lines: name epigraph weight constant lo hi U|G tag k var coef ...
///   END
///
/// Variables are referenced by name. Empty tags are written as "-".
/// Numbers use 17 significant digits, so doubles round-trip exactly.
void write_interchange(const ModelIR& ir, std::ostream& out);
void write_interchange(const ModelIR& ir, const std::filesystem::path& path);
ModelIR read_interchange(std::istream& in);
ModelIR read_interchange(const std::filesystem::path& path);

/// Solution file: "STATUS <status>" then one "name value" line per variable.
void write_solution(const ModelIR& ir, const SolveResult& result, std::ostream& out);
void write_solution(const ModelIR& ir, const SolveResult& result,
                    const std::filesystem::path& path);
/// Every variable of ir must appear when a solution is present; unknown names
/// and missing variables are errors.
SolveResult read_solution(const ModelIR& ir, std::istream& in);
SolveResult read_solution(const ModelIR& ir, const std::filesystem::path& path);

/// Runs an external solver through files. The command template may contain
/// {model} and {solution}, replaced with the file paths.
SolveResult solve_external(const ModelIR& ir, const std::string& command_template,
                           const std::filesystem::path& work_dir);

}  // namespace capprice::solver
