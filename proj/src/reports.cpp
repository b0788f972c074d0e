#include "moa/reports.hpp"

#include <sstream>

#include "json.hpp"
#include "moa/hashutil.hpp"

namespace moa {

namespace {

using json = nlohmann::json;

json loc_to_json(const SourceLoc& l) {
    return json{{"file", l.file}, {"line", l.line}, {"col", l.col}};
}

SourceLoc loc_from_json(const json& j) {
    SourceLoc l;
    l.file = j.at("file").get<std::string>();
    l.line = j.at("line").get<int>();
    l.col = j.at("col").get<int>();
    return l;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

std::string banner(const std::string& id) { return "---------- report-" + id + " ----------"; }

std::string join(const std::vector<DeclID>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string candidate_id(int cwe, const DeclID& decl, const std::string& local_path,
                         const SourceLoc& loc) {
    json j{{"cwe", cwe}, {"decl", decl}, {"local_path", local_path}, {"loc", loc.str()}};
    return short_hash(j.dump());
}

CandidateReport make_candidate(const CheckerFinding& finding, bool truncated,
                               int64_t paths_explored) {
    CandidateReport r;
    r.cwe = finding.cwe;
    r.decl = finding.decl;
    r.local_path = finding.local_path;
    r.loc = finding.loc;
    r.message = finding.message;
    r.truncated = truncated;
    r.paths_explored = paths_explored;
    r.id = candidate_id(r.cwe, r.decl, r.local_path, r.loc);
    return r;
}

std::string candidate_json(const CandidateReport& r) {
    json j;
    j["id"] = r.id;
    j["cwe"] = r.cwe;
    j["decl"] = r.decl;
    j["local_path"] = r.local_path;
    j["loc"] = loc_to_json(r.loc);
    j["message"] = r.message;
    j["engine_meta"] = json{{"truncated", r.truncated}, {"paths_explored", r.paths_explored}};
    return dump_canonical(j);
}

CandidateReport candidate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed candidate report: ") + e.what());
    }
    CandidateReport r;
    try {
        r.id = j.at("id").get<std::string>();
        r.cwe = j.at("cwe").get<int>();
        r.decl = j.at("decl").get<std::string>();
        r.local_path = j.at("local_path").get<std::string>();
        r.loc = loc_from_json(j.at("loc"));
        r.message = j.at("message").get<std::string>();
        r.truncated = j.at("engine_meta").at("truncated").get<bool>();
        r.paths_explored = j.at("engine_meta").at("paths_explored").get<int64_t>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed candidate report: ") + e.what());
    }
    return r;
}

std::string candidate_text(const CandidateReport& r, const std::string& source_line) {
    std::ostringstream out;
    out << banner(r.id) << "\n";
    out << "Local Path to Bug: " << r.local_path << "\n";
    out << "\n";
    out << "Annotated Source Code\n";
    out << r.loc.str() << ": warning: " << r.message << "\n";
    out << source_line << "\n";
    out << std::string(r.loc.col > 0 ? r.loc.col - 1 : 0, ' ') << "^\n";
    out << "1 warning generated.\n";
    return out.str();
}

WPQuery parse_candidate(const std::string& json_text, const ProgramIR& prog) {
    CandidateReport r = candidate_from_json(json_text);

    WPQuery q;
    q.field = r.decl;
    q.anchor_loc = r.loc;
    q.report_id = r.id;
    auto arrow = r.local_path.rfind("->");
    if (arrow == std::string::npos)
        throw std::runtime_error("malformed candidate report: local_path has no function segment");
    q.anchor_function = r.local_path.substr(arrow + 2);

    if (!prog.find_function(q.anchor_function))
        throw std::runtime_error("stale report: unknown function '" + q.anchor_function + "'");
    bool field_known = false;
    for (const auto& c : prog.classes)
        for (const auto& f : c.fields)
            if (f == q.field) field_known = true;
    if (!field_known) throw std::runtime_error("stale report: unknown field '" + q.field + "'");
    return q;
}

std::string queries_json(const std::vector<WPQuery>& queries) {
    json arr = json::array();
    for (const auto& q : queries) {
        json j;
        j["field"] = q.field;
        j["anchor_function"] = q.anchor_function;
        j["anchor_loc"] = loc_to_json(q.anchor_loc);
        j["report_id"] = q.report_id;
        arr.push_back(std::move(j));
    }
    return dump_canonical(arr);
}

std::vector<WPQuery> queries_from_json(const std::string& text) {
    json arr = json::parse(text);
    std::vector<WPQuery> out;
    for (const auto& j : arr) {
        WPQuery q;
        q.field = j.at("field").get<std::string>();
        q.anchor_function = j.at("anchor_function").get<std::string>();
        q.anchor_loc = loc_from_json(j.at("anchor_loc"));
        q.report_id = j.at("report_id").get<std::string>();
        out.push_back(std::move(q));
    }
    return out;
}

WPReport make_wp_report(const WPQuery& q, const WpaVerdict& v,
                        const std::vector<DeclID>& entries) {
    WPReport r;
    r.report_id = q.report_id;
    r.status = v.confirmed ? "Confirmed" : "FalsePositive";
    r.reason = v.reason;
    r.field = q.field;
    r.anchor_function = q.anchor_function;
    r.entries = entries;
    r.callchain = v.witness;
    r.chains_examined = v.chains_examined;
    return r;
}

std::string wp_report_json(const WPReport& r) {
    json j;
    j["report_id"] = r.report_id;
    j["status"] = r.status;
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["field"] = r.field;
    j["anchor_function"] = r.anchor_function;
    j["entries"] = r.entries;
    j["callchain"] = r.callchain;
    j["chains_examined"] = r.chains_examined;
    return dump_canonical(j);
}

WPReport wp_report_from_json(const std::string& text) {
    json j = json::parse(text);
    WPReport r;
    r.report_id = j.at("report_id").get<std::string>();
    r.status = j.at("status").get<std::string>();
    if (j.contains("reason")) r.reason = j["reason"].get<std::string>();
    r.field = j.at("field").get<std::string>();
    r.anchor_function = j.at("anchor_function").get<std::string>();
    r.entries = j.at("entries").get<std::vector<DeclID>>();
    r.callchain = j.at("callchain").get<std::vector<DeclID>>();
    r.chains_examined = j.at("chains_examined").get<int>();
    return r;
}

std::string wp_report_text(const WPReport& r) {
    std::ostringstream out;
    out << banner(r.report_id) << "\n";
    out << "[+] Parsing bug report report-" << r.report_id << "\n";
    out << "[+] Running garbage-read validation against " << join(r.entries, ", ") << "\n";
    out << "---------------------------------------\n";
    if (r.status == "Confirmed") {
        out << "Candidate callchain is: \n";
        out << "\n";
        for (size_t i = r.callchain.size(); i-- > 0;) {
            if (i == 0)
                out << r.callchain[i] << "\n";  // the entry frame, printed bare
            else
                out << r.callchain[i] << "()\n";
        }
    } else {
        out << "Classified as false positive: " << r.reason << "\n";
    }
    out << "-----------------------\n";
    return out.str();
}

}  // namespace moa
