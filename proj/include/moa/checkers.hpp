#pragma once

#include <string>
#include <vector>

#include "moa/ast.hpp"
#include "moa/engine.hpp"

namespace moa {

// One local finding, before whole-program validation. `decl` names what was
// flagged: a field id for uninitialized reads, an accessor or conversion
// descriptor for the value-shape checkers.
struct CheckerFinding {
    int cwe = 0;
    DeclID decl;
    SourceLoc loc;
    std::string local_path;  // "<decl>-><function>"
    std::string message;
    DeclID function;

    bool operator==(const CheckerFinding& o) const {
        return cwe == o.cwe && decl == o.decl && loc == o.loc && local_path == o.local_path &&
               message == o.message && function == o.function;
    }
};

// Registered checker ids, in canonical order.
const std::vector<std::string>& all_checker_ids();

// Everything stage 1 produces for one translation unit: per-function
// summaries plus the findings of the enabled checkers, deterministically
// sorted and deduplicated.
struct UnitAnalysis {
    std::vector<FunctionSummary> summaries;  // ordered by function id
    std::vector<CheckerFinding> findings;
    bool truncated = false;
    int64_t paths_explored = 0;
};

// Runs the engine over every function of `unit_name` and applies the given
// checkers. Unknown checker ids are ignored.
UnitAnalysis analyze_unit(const ProgramAST& prog, const std::string& unit_name,
                          const EngineConfig& cfg, const std::vector<std::string>& checkers);

}  // namespace moa
