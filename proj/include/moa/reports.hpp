// Candidate-report and whole-program-report serialization: the handoff
// between the per-unit stage and the whole-program stage. JSON is the
// machine-readable source of truth; the text renderings are derived from the
// same fields and frozen by golden tests.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "moa/checkers.hpp"
#include "moa/ir.hpp"
#include "moa/wpa.hpp"

namespace moa {

struct CandidateReport {
    std::string id;  // first 8 hex chars of the content hash
    int cwe = 0;
    DeclID decl;
    std::string local_path;  // "<decl>-><function>"
    SourceLoc loc;
    std::string message;
    bool truncated = false;
    int64_t paths_explored = 0;
};

// The id is a pure function of (cwe, decl, local_path, loc): re-hashing the
// same fields reproduces it.
std::string candidate_id(int cwe, const DeclID& decl, const std::string& local_path,
                         const SourceLoc& loc);

CandidateReport make_candidate(const CheckerFinding& finding, bool truncated,
                               int64_t paths_explored);

std::string candidate_json(const CandidateReport& r);
CandidateReport candidate_from_json(const std::string& text);  // throws std::runtime_error

// Text rendering: banner, local path, annotated source line with a caret
// under the flagged column, and the warning-count trailer.
std::string candidate_text(const CandidateReport& r, const std::string& source_line);

struct WPQuery {
    DeclID field;
    DeclID anchor_function;
    SourceLoc anchor_loc;
    std::string report_id;
};

// Builds the stage-2 query a candidate report encodes, validating it against
// the current program. Throws std::runtime_error on malformed input and
// "stale report ..." when the program no longer has the named function/field.
WPQuery parse_candidate(const std::string& json_text, const ProgramIR& prog);

std::string queries_json(const std::vector<WPQuery>& queries);
std::vector<WPQuery> queries_from_json(const std::string& text);

struct WPReport {
    std::string report_id;
    std::string status;  // "Confirmed" | "FalsePositive"
    std::string reason;  // empty when confirmed
    DeclID field;
    DeclID anchor_function;
    std::vector<DeclID> entries;
    std::vector<DeclID> callchain;  // entry first; empty unless confirmed
    int chains_examined = 0;
};

WPReport make_wp_report(const WPQuery& q, const WpaVerdict& v, const std::vector<DeclID>& entries);

std::string wp_report_json(const WPReport& r);
WPReport wp_report_from_json(const std::string& text);

// Text rendering: banner and progress lines, then the call chain printed
// callee first with the entry frame bare, or the false-positive
// classification line.
std::string wp_report_text(const WPReport& r);

}  // namespace moa
