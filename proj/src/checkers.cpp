#include "moa/checkers.hpp"

#include <algorithm>
#include <set>

namespace moa {

const std::vector<std::string>& all_checker_ids() {
    static const std::vector<std::string> ids = {"cwe457", "cwe843", "cwe195", "cwe194"};
    return ids;
}

namespace {

const char* kMsgGarbageRead = "Potentially uninitialized object field";
const char* kMsgBadTagAccess = "Tainted value may not hold the accessed type";
const char* kMsgImpossibleCast = "Downcast target type is impossible for this pointer";
const char* kMsgNegToUnsigned = "Implicit conversion of a possibly negative value to an unsigned type";
const char* kMsgSextSize = "Possibly negative value is sign-extended and used as a size argument";

CheckerFinding make_finding(int cwe, DeclID decl, SourceLoc loc, const DeclID& function,
                            const char* message) {
    CheckerFinding f;
    f.cwe = cwe;
    f.decl = std::move(decl);
    f.loc = std::move(loc);
    f.function = function;
    f.local_path = f.decl + "->" + function;
    f.message = message;
    return f;
}

// CWE-843 via accessor: a value whose tag set cannot be narrowed to the
// accessed representation, but only when the value came from outside.
void check_var_access(const PathEvent& ev, std::vector<CheckerFinding>& out) {
    if (ev.value.kind != AVKind::Var || !ev.value.tainted) return;
    TagMask expected = tag_bit(ev.accessor == "as_bool" ? VarTag::Bool : VarTag::Int);
    if (ev.value.tags == expected) return;
    out.push_back(make_finding(843, ev.accessor, ev.loc, ev.in_function, kMsgBadTagAccess));
}

// CWE-843 via downcast: the set of classes the pointer can hold is disjoint
// from the target's cone.
void check_downcast(const PathEvent& ev, const ProgramAST& prog,
                    std::vector<CheckerFinding>& out) {
    if (ev.possible_classes.empty()) return;  // nothing known about the receiver
    auto cone = prog.subclass_cone(ev.target_class);
    std::set<std::string> cone_set(cone.begin(), cone.end());
    for (const auto& c : ev.possible_classes)
        if (cone_set.count(c)) return;
    out.push_back(make_finding(843, "downcast<" + ev.target_class + ">", ev.loc, ev.in_function,
                               kMsgImpossibleCast));
}

// CWE-195: an implicit signed-to-unsigned conversion whose source value may
// be negative. Explicit casts never raise this event.
void check_sign_conversion(const PathEvent& ev, std::vector<CheckerFinding>& out) {
    if (ev.value.kind != AVKind::Int || !ev.value.iv.admits_negative()) return;
    out.push_back(make_finding(195, ev.detail, ev.loc, ev.in_function, kMsgNegToUnsigned));
}

// CWE-194: a size argument that was sign-extended from a narrower type while
// possibly negative. The finding points at the widening, not the sink.
void check_size_sink(const PathEvent& ev, std::vector<CheckerFinding>& out) {
    if (ev.value.kind != AVKind::Int || !ev.value.sext_origin ||
        !ev.value.iv.admits_negative())
        return;
    out.push_back(
        make_finding(194, "i8->i32", *ev.value.sext_origin, ev.in_function, kMsgSextSize));
}

}  // namespace

UnitAnalysis analyze_unit(const ProgramAST& prog, const std::string& unit_name,
                          const EngineConfig& cfg, const std::vector<std::string>& checkers) {
    std::set<std::string> enabled(checkers.begin(), checkers.end());
    bool want_events = enabled.count("cwe843") || enabled.count("cwe195") ||
                       enabled.count("cwe194");

    UnitAnalysis ua;
    std::vector<PathEvent> events;
    EventSink sink;
    if (want_events) sink = [&events](const PathEvent& ev) { events.push_back(ev); };

    for (const auto& [id, fn] : prog.functions) {
        if (fn->unit != unit_name) continue;
        FunctionSummary s = explore_function(*fn, prog, cfg, sink);
        ua.truncated = ua.truncated || s.truncated;
        ua.paths_explored += s.paths_explored;
        ua.summaries.push_back(std::move(s));
    }

    if (enabled.count("cwe457")) {
        for (const auto& gr : classify_candidates(ua.summaries, prog, unit_name))
            ua.findings.push_back(
                make_finding(457, gr.member, gr.loc, gr.function, kMsgGarbageRead));
    }
    for (const auto& ev : events) {
        switch (ev.kind) {
            case PathEventKind::VarAccess:
                if (enabled.count("cwe843")) check_var_access(ev, ua.findings);
                break;
            case PathEventKind::Downcast:
                if (enabled.count("cwe843")) check_downcast(ev, prog, ua.findings);
                break;
            case PathEventKind::SignedToUnsigned:
                if (enabled.count("cwe195")) check_sign_conversion(ev, ua.findings);
                break;
            case PathEventKind::SizeSink:
                if (enabled.count("cwe194")) check_size_sink(ev, ua.findings);
                break;
        }
    }

    std::sort(ua.findings.begin(), ua.findings.end(),
              [](const CheckerFinding& a, const CheckerFinding& b) {
                  if (!(a.loc == b.loc)) return a.loc < b.loc;
                  if (a.cwe != b.cwe) return a.cwe < b.cwe;
                  if (a.decl != b.decl) return a.decl < b.decl;
                  if (a.local_path != b.local_path) return a.local_path < b.local_path;
                  return a.function < b.function;
              });
    ua.findings.erase(std::unique(ua.findings.begin(), ua.findings.end(),
                                  [](const CheckerFinding& a, const CheckerFinding& b) {
                                      return a.cwe == b.cwe && a.loc == b.loc && a.decl == b.decl;
                                  }),
                      ua.findings.end());
    return ua;
}

}  // namespace moa
