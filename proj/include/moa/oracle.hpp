#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moa/ast.hpp"
#include "moa/diag.hpp"

namespace moa {

// One value consumed by extern_input(): a tagged payload.
struct TapeValue {
    VarTag tag = VarTag::Int;
    int64_t i = 0;  // Int payload
    bool b = false; // Bool payload

    bool operator==(const TapeValue& o) const { return tag == o.tag && i == o.i && b == o.b; }
};
using Tape = std::vector<TapeValue>;

// A defect observed while concretely executing the program.
struct OracleDefect {
    int cwe = 0;
    DeclID decl;     // field id, accessor name, or conversion descriptor
    SourceLoc loc;   // read/access/conversion site
    DeclID function; // function whose body contains `loc`
    std::vector<DeclID> call_stack;  // entry first, innermost last
    Tape witness;                    // inputs that made it happen
};

struct OracleResult {
    std::vector<OracleDefect> defects;  // deduplicated, sorted by (loc, cwe, decl)
    bool completed = true;              // false if any run hit the step limit
    int64_t steps = 0;
    int inputs_consumed = 0;  // extern_input() calls observed on the probe run
    // Dynamically observed virtual-call targets, keyed by call site ("file:line:col").
    std::map<std::string, std::set<DeclID>> vcall_targets;
};

// Executes the program from `entry` (a zero-argument function) with the given
// input tape. Exhausted tapes yield Int(0).
OracleResult oracle_run(const ProgramAST& prog, const DeclID& entry, const Tape& tape);

// The per-position input domain used by oracle_enumerate: every i8 payload,
// a spread of i32 magnitudes, both booleans, and a reference.
const std::vector<TapeValue>& oracle_tape_domain();

// Runs `entry` over all tapes of the observed input arity (capped at two
// positions) and unions the results.
OracleResult oracle_enumerate(const ProgramAST& prog, const DeclID& entry);

}  // namespace moa
