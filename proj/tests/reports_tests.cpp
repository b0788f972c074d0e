#include <algorithm>
#include <cctype>
#include <string>

#include "doctest.h"
#include "moa/reports.hpp"
#include "test_util.hpp"

using namespace moa;

namespace {

ProgramAST listing_program() {
    return testutil::must_analyze(
        {{"foo.mo", testutil::listing_foo_mo()}, {"main.mo", testutil::listing_main_mo()}});
}

CandidateReport listing_candidate(const ProgramAST& prog) {
    auto ua = analyze_unit(prog, "foo", EngineConfig{}, all_checker_ids());
    REQUIRE(ua.findings.size() == 1);
    return make_candidate(ua.findings[0], ua.truncated, ua.paths_explored);
}

ProgramIR listing_ir(const ProgramAST& prog) {
    auto res = link_units({lower_unit(prog, "foo"), lower_unit(prog, "main")}, {"main"});
    REQUIRE(res.errors.empty());
    return std::move(*res.program);
}

}  // namespace

TEST_CASE("report ids are deterministic eight-char hashes of the finding") {
    auto prog = listing_program();
    CandidateReport a = listing_candidate(prog);
    CandidateReport b = listing_candidate(prog);

    CHECK(a.id == b.id);
    CHECK(a.id.size() == 8);
    CHECK(std::all_of(a.id.begin(), a.id.end(),
                      [](unsigned char c) { return std::isxdigit(c) && !std::isupper(c); }));

    // Re-hashing the listed fields reproduces the id.
    CHECK(candidate_id(a.cwe, a.decl, a.local_path, a.loc) == a.id);

    // A change in any hashed field moves the id.
    SourceLoc moved = a.loc;
    moved.line += 1;
    CHECK(candidate_id(a.cwe, a.decl, a.local_path, moved) != a.id);
    CHECK(candidate_id(195, a.decl, a.local_path, a.loc) != a.id);
}

TEST_CASE("the running example's candidate renders with path, caret, and trailer") {
    auto prog = listing_program();
    CandidateReport r = listing_candidate(prog);

    CHECK(r.cwe == 457);
    CHECK(r.decl == "foo::x");
    CHECK(r.local_path == "foo::x->foo::isZero");
    CHECK(r.message == "Potentially uninitialized object field");
    CHECK(r.loc.file == "foo.mo");
    CHECK(r.loc.line == 6);

    std::string line = "    if (!x) {";
    std::string text = candidate_text(r, line);
    std::string expected = "---------- report-" + r.id + " ----------\n" +
                           "Local Path to Bug: foo::x->foo::isZero\n" +
                           "\n" +
                           "Annotated Source Code\n" +
                           "foo.mo:" + std::to_string(r.loc.line) + ":" +
                           std::to_string(r.loc.col) +
                           ": warning: Potentially uninitialized object field\n" +
                           line + "\n" +
                           std::string(r.loc.col - 1, ' ') + "^\n" +
                           "1 warning generated.\n";
    CHECK(text == expected);
    CHECK(text.back() == '\n');
    CHECK(text[text.size() - 2] != '\n');
}

TEST_CASE("candidate reports survive a JSON round trip byte for byte") {
    auto prog = listing_program();
    CandidateReport r = listing_candidate(prog);

    std::string first = candidate_json(r);
    CandidateReport back = candidate_from_json(first);
    CHECK(candidate_json(back) == first);
    CHECK(back.id == r.id);
    CHECK(back.cwe == r.cwe);
    CHECK(back.decl == r.decl);
    CHECK(back.local_path == r.local_path);
    CHECK(back.loc == r.loc);
    CHECK(back.message == r.message);
    CHECK(back.truncated == r.truncated);
    CHECK(back.paths_explored == r.paths_explored);
    CHECK(first.back() == '\n');
}

TEST_CASE("a candidate report parses into the stage-two query") {
    auto prog = listing_program();
    ProgramIR p = listing_ir(prog);
    CandidateReport r = listing_candidate(prog);

    WPQuery q = parse_candidate(candidate_json(r), p);
    CHECK(q.field == "foo::x");
    CHECK(q.anchor_function == "foo::isZero");
    CHECK(q.anchor_loc == r.loc);
    CHECK(q.report_id == r.id);
}

TEST_CASE("stale and malformed candidate reports are rejected by name") {
    auto prog = listing_program();
    ProgramIR p = listing_ir(prog);
    CandidateReport r = listing_candidate(prog);

    CandidateReport gone_fn = r;
    gone_fn.local_path = "foo::x->foo::vanished";
    CHECK_THROWS_WITH_AS(parse_candidate(candidate_json(gone_fn), p),
                         "stale report: unknown function 'foo::vanished'", std::runtime_error);

    CandidateReport gone_field = r;
    gone_field.decl = "foo::y";
    CHECK_THROWS_WITH_AS(parse_candidate(candidate_json(gone_field), p),
                         "stale report: unknown field 'foo::y'", std::runtime_error);

    CHECK_THROWS_AS(parse_candidate("{ not json", p), std::runtime_error);
    CHECK_THROWS_AS(parse_candidate("{}", p), std::runtime_error);
}

TEST_CASE("query lists round-trip through their file form") {
    auto prog = listing_program();
    ProgramIR p = listing_ir(prog);
    WPQuery q = parse_candidate(candidate_json(listing_candidate(prog)), p);

    std::string text = queries_json({q, q});
    auto back = queries_from_json(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].field == q.field);
    CHECK(back[0].anchor_function == q.anchor_function);
    CHECK(back[0].anchor_loc == q.anchor_loc);
    CHECK(back[0].report_id == q.report_id);
    CHECK(queries_json(back) == text);
}

TEST_CASE("a confirmed whole-program report prints the chain callee first") {
    auto prog = listing_program();
    ProgramIR p = listing_ir(prog);
    CandidateReport r = listing_candidate(prog);
    WPQuery q = parse_candidate(candidate_json(r), p);

    CallGraph cg = build_callgraph(p);
    devirtualize_cha(p, cg);
    resolve_indirect(p, cg);
    rta_prune(p, cg, {"main"});
    auto verdict = validate_garbage_read(p, cg, q.field, q.anchor_function, {"main"}, {});
    REQUIRE(verdict.confirmed);

    WPReport wp = make_wp_report(q, verdict, {"main"});
    CHECK(wp.status == "Confirmed");
    CHECK(wp.callchain == std::vector<DeclID>{"main", "foo::isZero"});

    std::string expected = "---------- report-" + r.id + " ----------\n" +
                           "[+] Parsing bug report report-" + r.id + "\n" +
                           "[+] Running garbage-read validation against main\n" +
                           "---------------------------------------\n" +
                           "Candidate callchain is: \n" +
                           "\n" +
                           "foo::isZero()\n" +
                           "main\n" +
                           "-----------------------\n";
    CHECK(wp_report_text(wp) == expected);
}

TEST_CASE("a rejected whole-program report states its classification") {
    WPQuery q;
    q.field = "C::p";
    q.anchor_function = "C::orphan";
    q.report_id = "deadbeef";

    WpaVerdict v;
    v.reason = "unreachable";

    WPReport wp = make_wp_report(q, v, {"main"});
    CHECK(wp.status == "FalsePositive");
    std::string text = wp_report_text(wp);
    CHECK(text.find("Classified as false positive: unreachable") != std::string::npos);
    CHECK(text.find("Candidate callchain") == std::string::npos);
    CHECK(text.back() == '\n');
}

TEST_CASE("whole-program reports survive a JSON round trip byte for byte") {
    WPQuery q;
    q.field = "foo::x";
    q.anchor_function = "foo::isZero";
    q.anchor_loc = SourceLoc{"foo.mo", 6, 10};
    q.report_id = "0a1b2c3d";

    WpaVerdict v;
    v.confirmed = true;
    v.witness = {"main", "foo::isZero"};
    v.chains_examined = 1;

    WPReport wp = make_wp_report(q, v, {"main"});
    std::string first = wp_report_json(wp);
    WPReport back = wp_report_from_json(first);
    CHECK(wp_report_json(back) == first);
    CHECK(back.status == "Confirmed");
    CHECK(back.callchain == wp.callchain);
    CHECK(back.chains_examined == 1);
    CHECK(first.back() == '\n');
}
