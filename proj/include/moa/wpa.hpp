// Whole-program analysis over linked IR: call-graph construction,
// devirtualization, function-pointer resolution, and demand-driven
// validation of garbage-read candidates.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moa/ir.hpp"

namespace moa {

// One dynamic call site (virtual or through a function value) plus the
// target sets each resolution stage assigns to it.
struct DynSite {
    DeclID in_function;
    SourceLoc loc;
    bool is_vcall = false;  // otherwise an indirect call
    int vslot = -1;
    std::string static_class;        // vcalls only
    std::set<DeclID> cha_targets;    // hierarchy-based possibilities
    std::set<DeclID> targets;        // current (post-pruning) possibilities
    bool devirtualized = false;      // exactly one target remains
    std::string reason;              // why the set is empty or how it was resolved
};

struct CallGraph {
    // Static edges: direct calls plus the constructor chains implied by
    // allocations (an allocation edges to the nearest constructor in the
    // class chain, and each constructor edges to the next one above it).
    std::map<DeclID, std::set<DeclID>> edges;
    std::vector<DynSite> dyn_sites;
};

CallGraph build_callgraph(const ProgramIR& prog);

// Fills every virtual site's target set from the class hierarchy: all
// overrides reachable from the static receiver class's subtree.
void devirtualize_cha(const ProgramIR& prog, CallGraph& cg);

// Resolves indirect sites whose function value can be pinned to a single
// constant: a literal at the call, a single local binding, or a single
// program-wide store to a function-typed field.
void resolve_indirect(const ProgramIR& prog, CallGraph& cg);

// Rapid-type filtering: iterates reachability and allocation discovery to a
// fixpoint, then drops virtual targets whose receiver class is never
// instantiated in reachable code.
void rta_prune(const ProgramIR& prog, CallGraph& cg, const std::vector<DeclID>& entries);

// Successors of `fn` under the current resolution state.
std::set<DeclID> callees_of(const CallGraph& cg, const DeclID& fn);

// Functions reachable from the entry points under the current state.
std::set<DeclID> reachable_from(const CallGraph& cg, const std::vector<DeclID>& entries);

// Functions whose bodies store the field directly. With alias resolution
// enabled, a caller that binds the field to a by-reference parameter the
// callee writes also counts (one hop only).
std::set<DeclID> field_store_scan(const ProgramIR& prog, const DeclID& field,
                                  bool resolve_ref_aliases);

struct WpaOptions {
    int chain_cap = 16;
    int max_depth = 64;
    bool resolve_ref_aliases = false;
};

struct WpaVerdict {
    bool confirmed = false;
    std::string reason;           // set when not confirmed
    std::vector<DeclID> witness;  // entry-first call chain for a confirmed read
    int chains_examined = 0;
};

// Decides whether a field read flagged locally can actually observe an
// uninitialized value: searches acyclic call chains from the entry points to
// the reading function and confirms if at least one chain neither stores the
// field nor constructs a receiver whose constructor chain stores it. The
// reading function's own body is stage-one territory and is not credited.
WpaVerdict validate_garbage_read(const ProgramIR& prog, const CallGraph& cg, const DeclID& field,
                                 const DeclID& read_fn, const std::vector<DeclID>& entries,
                                 const WpaOptions& opts);

}  // namespace moa
