#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "moa/ast.hpp"
#include "moa/diag.hpp"

// Per-unit forward symbolic execution. Each function of a unit is explored
// path by path over a light abstract domain (integer intervals, three-valued
// booleans, var-tag sets, class-pointer type sets, taint flags). Exploration
// populates per-function Def / UseWithoutDef summaries for the
// uninitialized-field analysis and hands typed path events to checkers.

namespace moa {

// ---------------------------------------------------------------------------
// Abstract values
// ---------------------------------------------------------------------------

int64_t type_min(TypeKind k);
int64_t type_max(TypeKind k);

// Closed integer interval, clamped to the range of a concrete integer type.
// Arithmetic that can leave the type's range widens to the full range (the
// language wraps on overflow, so the full range is the safe answer).
struct Interval {
    int64_t lo = 0;
    int64_t hi = 0;

    bool contains(int64_t v) const { return lo <= v && v <= hi; }
    bool admits_negative() const { return lo < 0; }
    bool singleton() const { return lo == hi; }

    static Interval full(TypeKind k) { return {type_min(k), type_max(k)}; }
    static Interval constant(int64_t v) { return {v, v}; }
};

inline bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
}

Interval interval_binop(BinaryOp op, Interval a, Interval b, TypeKind result_type);

// Three-valued boolean.
enum class Tri : uint8_t { False, True, Unknown };

inline Tri tri_not(Tri t) {
    if (t == Tri::Unknown) return Tri::Unknown;
    return t == Tri::True ? Tri::False : Tri::True;
}

// Bitmask over VarTag values.
using TagMask = uint8_t;
constexpr TagMask tag_bit(VarTag t) { return static_cast<TagMask>(1u << static_cast<int>(t)); }
constexpr TagMask kTagAll = 0x7;

enum class AVKind : uint8_t { Unknown, Int, Bool, Var, Tag, Class, Fn, Buf };

// One abstract value; `kind` selects which fields are meaningful.
struct AbstractValue {
    AVKind kind = AVKind::Unknown;

    // Int: interval over int_type's range; sext_origin marks the site of a
    // signed widening whose source admitted negative values (the value is
    // "sign-extension flagged" until a binop or explicit cast clears it).
    Interval iv;
    TypeKind int_type = TypeKind::I32;
    std::optional<SourceLoc> sext_origin;

    // Bool
    Tri bv = Tri::Unknown;

    // Var: which runtime tags the boxed value may carry; tainted marks values
    // that originate from extern_input().
    TagMask tags = kTagAll;
    bool tainted = false;

    // Tag: result of tag_of(); tag_value set when statically known; tag_origin
    // names the local whose tag this is, so comparisons can refine that local.
    std::optional<VarTag> tag_value;
    std::string tag_origin;

    // Class: possible dynamic classes of a class pointer.
    std::set<std::string> classes;

    // Fn: resolved target when statically known.
    DeclID fn_target;

    static AbstractValue top_of(const Type& t, const ProgramAST& prog);
    static AbstractValue int_const(int64_t v, TypeKind k);
    static AbstractValue bool_const(bool b);
};

// ---------------------------------------------------------------------------
// Function summaries (Def / UseWithoutDef)
// ---------------------------------------------------------------------------

struct UseEntry {
    DeclID member;
    SourceLoc loc;

    bool operator<(const UseEntry& o) const {
        if (member != o.member) return member < o.member;
        return loc < o.loc;
    }
    bool operator==(const UseEntry& o) const { return member == o.member && loc == o.loc; }
};

// Per-function analysis summary. During exploration each path carries its own
// copy (a definition on one branch must not mask a use on a sibling branch);
// the merged summary is the union over all explored paths.
struct FunctionSummary {
    DeclID function;
    // member -> location of its first definition (earliest source location
    // across paths, so the merge is independent of exploration order).
    std::map<DeclID, SourceLoc> def_set;
    // (member, use location) pairs read before any definition on some path.
    std::set<UseEntry> use_without_def_set;
    bool truncated = false;
    int64_t paths_explored = 0;
};

enum class EventKind : uint8_t { Def, Use };

// The two population rules:
//   Def: insert into def_set iff the member is not already present.
//   Use: insert into use_without_def_set iff the member is absent from
//        def_set at event time.
void record_event(FunctionSummary& summary, EventKind kind, const DeclID& member, SourceLoc loc);

// Union-merge one path's summary into the accumulated function summary.
void merge_summary(FunctionSummary& into, const FunctionSummary& path);

// ---------------------------------------------------------------------------
// Path events delivered to checkers
// ---------------------------------------------------------------------------

enum class PathEventKind : uint8_t {
    VarAccess,          // as_int / as_int8 / as_bool on a var value
    Downcast,           // downcast<C>(p)
    SignedToUnsigned,   // implicit equal-width signed -> unsigned conversion
    SizeSink,           // value reaching the size parameter of alloc/read_buf
};

struct PathEvent {
    PathEventKind kind;
    SourceLoc loc;            // access / conversion / widening-origin site
    DeclID in_function;       // function being summarized (exploration root)
    AbstractValue value;      // the var / source value / size value
    std::string accessor;     // VarAccess: "as_int" | "as_int8" | "as_bool"
    std::string target_class; // Downcast: C
    std::vector<std::string> possible_classes;  // Downcast: sorted possible set
    std::string detail;       // conversions: "i32->u32", "i8->i32"
};

using EventSink = std::function<void(const PathEvent&)>;

// ---------------------------------------------------------------------------
// Exploration
// ---------------------------------------------------------------------------

struct EngineConfig {
    int loop_bound = 2;           // loop unrollings before widening
    int64_t path_budget = 10000;  // maximum forked paths per function
    int inline_depth = 3;         // same-unit direct-call inlining depth
    int64_t step_budget = 200000; // per-path statement/expression budget
};

// Explore every feasible path of `fn` (under the abstract domain) up to the
// configured budgets. Events on each path reach `sink` in program order when
// a sink is provided. Returns the merged summary.
FunctionSummary explore_function(const FunctionDecl& fn, const ProgramAST& prog,
                                 const EngineConfig& cfg, const EventSink& sink = nullptr);

// ---------------------------------------------------------------------------
// Candidate classification (uninitialized object fields)
// ---------------------------------------------------------------------------

struct GarbageRead {
    DeclID member;
    DeclID function;        // function whose summary holds the use
    SourceLoc loc;          // use site
    std::string local_path; // "member->function"
};

// Cross-context classification over a unit's summaries: a use-without-def of
// member m survives unless m's owner class is declared in this unit and its
// constructor's summary defines m. A use inside the owner's own constructor
// is always a candidate. Classes without a constructor behave as if they had
// an empty one. Results are sorted by (loc, member, function) and deduplicated
// per (member, use site).
std::vector<GarbageRead> classify_candidates(const std::vector<FunctionSummary>& summaries,
                                             const ProgramAST& prog,
                                             const std::string& unit_name);

}  // namespace moa
