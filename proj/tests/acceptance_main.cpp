// Acceptance gate for the analyzer. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero when any criterion fails. The
// checks drive the installed CLI binary for workflow-level criteria and the
// library API for the property suites.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "moa/bench.hpp"
#include "moa/driver.hpp"
#include "moa/engine.hpp"
#include "moa/frontend.hpp"
#include "moa/ir.hpp"
#include "moa/oracle.hpp"
#include "moa/wpa.hpp"

using namespace moa;
namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_source_dir;
fs::path g_scratch;

// Measurements shared between criteria 4 and 9.
BenchResult g_corpus_result;
double g_corpus_secs = 0.0;
fs::path g_corpus_out;
bool g_corpus_ran = false;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in.good()) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(MOA_ANALYZER_BIN) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Recursive byte map of a directory, skipping cache internals plus any file
// named in `exclude` (timing and, where statuses legitimately differ between
// runs, the run summary).
std::map<std::string, std::string> snapshot(const fs::path& dir,
                                            const std::set<std::string>& exclude) {
    std::map<std::string, std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& de : fs::recursive_directory_iterator(dir)) {
        if (!de.is_regular_file()) continue;
        fs::path rel = fs::relative(de.path(), dir);
        std::string rels = rel.generic_string();
        if (rels.rfind("cache/", 0) == 0 || rels.find("/cache/") != std::string::npos) continue;
        if (exclude.count(rel.filename().string())) continue;
        out[rels] = slurp(de.path());
    }
    return out;
}

std::string diff_keys(const std::map<std::string, std::string>& a,
                      const std::map<std::string, std::string>& b) {
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it == b.end()) return "only in first: " + k;
        if (it->second != v) return "differs: " + k;
    }
    for (const auto& [k, v] : b)
        if (!a.count(k)) return "only in second: " + k;
    return "";
}

void append_newline(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::app);
    out << "\n";
}

std::string require_golden_match(const fs::path& produced, const fs::path& golden) {
    std::string got = slurp(produced);
    std::string want = slurp(golden);
    if (got != want) return produced.filename().string() + " differs from committed golden";
    return "";
}

// ---------------------------------------------------------------------------
// 1. Running example: one candidate, one confirmed whole-program report,
//    byte-identical to the committed goldens, in under a second.
// ---------------------------------------------------------------------------

std::string crit1() {
    fs::path out = g_scratch / "c1";
    auto t0 = Clock::now();
    int rc = run_cli("run --manifest " + (g_source_dir / "fixtures/listing1/manifest.json").string() +
                     " --out " + out.string());
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (rc != 1) return "expected exit code 1 (confirmed finding), got " + std::to_string(rc);
    if (secs >= 1.0) return "took " + std::to_string(secs) + "s (budget 1s)";

    fs::path golden = g_source_dir / "tests/golden/listing1";
    std::vector<std::string> names;
    for (const auto& de : fs::directory_iterator(out / "reports"))
        names.push_back(de.path().filename().string());
    if (names.size() != 4) return "expected 4 report files, got " + std::to_string(names.size());
    for (const auto& n : names) {
        std::string err = require_golden_match(out / "reports" / n, golden / n);
        if (!err.empty()) return err;
    }

    json cand;
    for (const auto& n : names)
        if (n.rfind("report-", 0) == 0 && n.find(".json") != std::string::npos)
            cand = json::parse(slurp(out / "reports" / n));
    if (cand["local_path"] != "foo::x->foo::isZero") return "wrong local path";
    if (cand["message"] != "Potentially uninitialized object field") return "wrong message";

    std::string wp_txt;
    for (const auto& n : names)
        if (n.rfind("wp-report-", 0) == 0 && n.find(".txt") != std::string::npos)
            wp_txt = slurp(out / "reports" / n);
    size_t chain = wp_txt.find("Candidate callchain is: ");
    size_t callee = wp_txt.find("foo::isZero()");
    size_t entry = wp_txt.find("\nmain\n");
    if (chain == std::string::npos) return "missing callchain block";
    if (callee == std::string::npos || entry == std::string::npos || callee < chain ||
        entry < callee)
        return "callchain does not list foo::isZero() then main";
    return "";
}

// ---------------------------------------------------------------------------
// 2. Candidate preserved across a fix: the variant whose constructor assigns
//    x = 0 produces no fresh stage-1 finding, and re-validating the original
//    candidate against the fixed build classifies it FalsePositive via the
//    matching constructor store.
// ---------------------------------------------------------------------------

std::string crit2() {
    fs::path out = g_scratch / "c2";
    fs::path manifest = g_source_dir / "fixtures/listing1-fixed/manifest.json";
    int rc = run_cli("stage1 --manifest " + manifest.string() + " --out " + out.string());
    if (rc != 0) return "stage1 exit " + std::to_string(rc);
    if (fs::exists(out / "reports"))
        for (const auto& de : fs::directory_iterator(out / "reports")) {
            (void)de;
            return "fixed constructor still produced a stage-1 finding";
        }
    fs::create_directories(out / "reports");

    // The very candidate the buggy build produced, re-checked against the
    // fixed build through the split-stage workflow.
    fs::path golden1 = g_source_dir / "tests/golden/listing1";
    fs::copy_file(golden1 / "report-e0176b0e.json", out / "reports/report-e0176b0e.json");
    fs::copy_file(golden1 / "report-e0176b0e.txt", out / "reports/report-e0176b0e.txt");
    rc = run_cli("stage2 --manifest " + manifest.string() + " --out " + out.string());
    if (rc != 0) return "stage2 exit " + std::to_string(rc);

    fs::path golden2 = g_source_dir / "tests/golden/listing1-fixed";
    for (const char* n : {"wp-report-e0176b0e.json", "wp-report-e0176b0e.txt"}) {
        std::string err = require_golden_match(out / "reports" / n, golden2 / n);
        if (!err.empty()) return err;
    }
    json wp = json::parse(slurp(out / "reports/wp-report-e0176b0e.json"));
    if (wp["status"] != "FalsePositive") return "expected FalsePositive";
    if (wp["reason"].get<std::string>().find("initialize the field") == std::string::npos)
        return "missing matching-store reason";
    return "";
}

// ---------------------------------------------------------------------------
// 3. Reference-parameter stores: missed by default (Confirmed), credited with
//    --resolve-ref-aliases (FalsePositive). Both outcomes golden-checked.
// ---------------------------------------------------------------------------

std::string crit3() {
    fs::path manifest = g_source_dir / "fixtures/refalias/manifest.json";

    fs::path off = g_scratch / "c3-off";
    int rc = run_cli("run --manifest " + manifest.string() + " --out " + off.string());
    if (rc != 1) return "default run: expected exit 1, got " + std::to_string(rc);
    for (const char* n : {"wp-report-9a4cfe18.json", "wp-report-9a4cfe18.txt"}) {
        std::string err = require_golden_match(off / "reports" / n,
                                               g_source_dir / "tests/golden/refalias-off" / n);
        if (!err.empty()) return std::string("off: ") + err;
    }
    if (json::parse(slurp(off / "reports/wp-report-9a4cfe18.json"))["status"] != "Confirmed")
        return "off: expected Confirmed";

    fs::path on = g_scratch / "c3-on";
    rc = run_cli("run --manifest " + manifest.string() + " --resolve-ref-aliases --out " +
                 on.string());
    if (rc != 0) return "aliased run: expected exit 0, got " + std::to_string(rc);
    for (const char* n : {"wp-report-9a4cfe18.json", "wp-report-9a4cfe18.txt"}) {
        std::string err = require_golden_match(on / "reports" / n,
                                               g_source_dir / "tests/golden/refalias-on" / n);
        if (!err.empty()) return std::string("on: ") + err;
    }
    if (json::parse(slurp(on / "reports/wp-report-9a4cfe18.json"))["status"] != "FalsePositive")
        return "on: expected FalsePositive";
    return "";
}

// ---------------------------------------------------------------------------
// 4. Corpus vs oracle: every concretely provoked defect is flagged (zero
//    false negatives), and the per-CWE rates are byte-identical to the
//    committed results.
// ---------------------------------------------------------------------------

std::string crit4() {
    g_corpus_out = g_scratch / "c4";
    auto t0 = Clock::now();
    g_corpus_result = run_corpus(g_source_dir / "corpus", g_corpus_out, 8);
    g_corpus_secs = std::chrono::duration<double>(Clock::now() - t0).count();
    g_corpus_ran = true;

    const BenchResult& r = g_corpus_result;
    if (!r.errors.empty()) return "corpus errors: " + r.errors.front();
    if (r.cases.size() < 160)
        return "only " + std::to_string(r.cases.size()) + " cases (need 160)";
    for (const auto& c : r.cases) {
        if (!c.oracle_agrees) return c.cwe_dir + "/" + c.id + ": label not oracle-confirmed";
        if (!c.pipeline_covers) return c.cwe_dir + "/" + c.id + ": oracle defect not flagged";
    }
    if (r.per_cwe.size() != 4) return "expected 4 weakness classes";
    for (const auto& [cwe, counts] : r.per_cwe)
        if (counts.fn != 0) return cwe + ": " + std::to_string(counts.fn) + " false negatives";
    if (bench_results_json(r) != slurp(g_source_dir / "tests/golden/bench-results.json"))
        return "bench-results.json differs from committed golden";
    return "";
}

// ---------------------------------------------------------------------------
// 5. Call-graph properties on random hierarchies: dynamic dispatch targets
//    observed by concrete execution are contained in CHA and survive RTA;
//    devirtualized sites have exactly the observed target.
// ---------------------------------------------------------------------------

struct HierarchyProgram {
    std::string source;
};

HierarchyProgram gen_hierarchy(uint32_t seed) {
    std::mt19937 rng(seed);
    int n = 2 + static_cast<int>(rng() % 5);  // 2..6 classes
    std::vector<int> parent(n, -1);
    for (int i = 1; i < n; ++i) parent[i] = static_cast<int>(rng() % (i + 1)) - 1;

    auto root_of = [&](int i) {
        while (parent[i] >= 0) i = parent[i];
        return i;
    };
    std::vector<int> slots(n, 0);  // root classes: number of virtual methods
    for (int i = 0; i < n; ++i)
        if (parent[i] < 0) slots[i] = 1 + static_cast<int>(rng() % 3);

    std::ostringstream src;
    for (int i = 0; i < n; ++i) {
        src << "class K" << i;
        if (parent[i] >= 0) src << " : K" << parent[i];
        src << " {\n";
        src << "  K" << i << "() {\n  }\n";
        int ns = slots[root_of(i)];
        for (int j = 0; j < ns; ++j) {
            bool declares = parent[i] < 0 || (rng() & 1) != 0;
            if (declares)
                src << "  virtual fn m" << j << "() -> i32 {\n    return " << (10 * i + j + 1)
                    << ";\n  }\n";
        }
        src << "}\n";
    }

    src << "\nfn main() -> i32 {\n";
    int ni = 1 + static_cast<int>(rng() % 4);
    std::vector<int> ptr_static;
    for (int k = 0; k < ni; ++k) {
        int ci = static_cast<int>(rng() % n);
        std::vector<int> chain;
        for (int c = ci; c >= 0; c = parent[c]) chain.push_back(c);
        int anc = chain[rng() % chain.size()];
        src << "  p" << k << ": K" << anc << "* = new K" << ci << "();\n";
        ptr_static.push_back(anc);
    }
    int r = 0;
    for (int k = 0; k < ni; ++k) {
        int ns = slots[root_of(ptr_static[k])];
        for (int j = 0; j < ns; ++j)
            src << "  r" << r++ << ": i32 = p" << k << ".m" << j << "();\n";
    }
    src << "  return 0;\n}\n";
    return HierarchyProgram{src.str()};
}

std::string crit5() {
    auto t0 = Clock::now();
    int sites_checked = 0;
    for (uint32_t seed = 0; seed < 200; ++seed) {
        HierarchyProgram hp = gen_hierarchy(seed);
        DiagList diags;
        ProgramAST prog = analyze_sources({{"main.mo", hp.source}}, diags);
        if (!diags.empty())
            return "seed " + std::to_string(seed) + ": " + diags.front().str();

        UnitIR unit = lower_unit(prog, "main");
        auto linked = link_units({unit}, {"main"});
        if (!linked.errors.empty())
            return "seed " + std::to_string(seed) + ": link: " + linked.errors.front();
        const ProgramIR& p = *linked.program;

        CallGraph cg = build_callgraph(p);
        devirtualize_cha(p, cg);
        resolve_indirect(p, cg);
        rta_prune(p, cg, {"main"});

        OracleResult orc = oracle_run(prog, "main", {});
        if (!orc.completed) return "seed " + std::to_string(seed) + ": oracle step limit";

        for (const auto& site : cg.dyn_sites) {
            if (!site.is_vcall) continue;
            ++sites_checked;
            auto it = orc.vcall_targets.find(site.loc.str());
            std::set<DeclID> observed =
                it == orc.vcall_targets.end() ? std::set<DeclID>{} : it->second;
            if (observed.empty())
                return "seed " + std::to_string(seed) + ": site " + site.loc.str() +
                       " never executed";
            for (const auto& t : observed) {
                if (!site.cha_targets.count(t))
                    return "seed " + std::to_string(seed) + ": observed target " + t +
                           " missing from CHA set";
                if (!site.targets.count(t))
                    return "seed " + std::to_string(seed) + ": observed target " + t +
                           " pruned by RTA";
            }
            for (const auto& t : site.targets)
                if (!site.cha_targets.count(t))
                    return "seed " + std::to_string(seed) + ": RTA added target " + t +
                           " outside CHA";
            if (site.devirtualized) {
                if (site.targets.size() != 1)
                    return "seed " + std::to_string(seed) + ": devirtualized with " +
                           std::to_string(site.targets.size()) + " targets";
                if (observed != site.targets)
                    return "seed " + std::to_string(seed) +
                           ": devirtualized target differs from observed";
            }
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (sites_checked < 200)
        return "only " + std::to_string(sites_checked) + " dynamic sites exercised";
    if (secs >= 30.0) return "took " + std::to_string(secs) + "s (budget 30s)";
    return "";
}

// ---------------------------------------------------------------------------
// 6. Straight-line summaries equal a direct gen-kill computation over the
//    statement list, for 500 generated functions.
// ---------------------------------------------------------------------------

std::string gen_straightline(uint32_t seed) {
    std::mt19937 rng(seed);
    std::ostringstream src;
    src << "class Q {\n";
    for (int f = 0; f < 5; ++f) src << "  f" << f << ": i32;\n";
    src << "  Q() {\n  }\n";
    src << "  fn body() -> i32 {\n";
    int L = 1 + static_cast<int>(rng() % 12);
    int reads = 0;
    for (int s = 0; s < L; ++s) {
        int form = static_cast<int>(rng() % 3);
        int a = static_cast<int>(rng() % 5);
        int b = static_cast<int>(rng() % 5);
        if (form == 0)
            src << "    f" << a << " = " << (rng() % 100) << ";\n";
        else if (form == 1)
            src << "    r" << reads++ << ": i32 = f" << a << ";\n";
        else
            src << "    f" << a << " = f" << b << " + 1;\n";
    }
    src << "    return 0;\n  }\n}\n";
    src << "\nfn main() -> i32 {\n  return 0;\n}\n";
    return src.str();
}

void collect_reads(const Expr& e, std::map<DeclID, SourceLoc>& def,
                   std::set<UseEntry>& use) {
    if (e.kind == ExprKind::FieldAccess) {
        if (!def.count(e.decl)) use.insert(UseEntry{e.decl, e.loc});
        if (e.base) collect_reads(*e.base, def, use);
        return;
    }
    if (e.base) collect_reads(*e.base, def, use);
    if (e.rhs) collect_reads(*e.rhs, def, use);
    for (const auto& a : e.args) collect_reads(*a, def, use);
}

std::string crit6() {
    for (uint32_t seed = 0; seed < 500; ++seed) {
        std::string src = gen_straightline(seed);
        DiagList diags;
        ProgramAST prog = analyze_sources({{"q.mo", src}}, diags);
        if (!diags.empty())
            return "seed " + std::to_string(seed) + ": " + diags.front().str();
        const FunctionDecl* body = prog.find_function("Q::body");
        if (!body) return "seed " + std::to_string(seed) + ": missing Q::body";

        // Reference: one linear pass over the statement list.
        std::map<DeclID, SourceLoc> ref_def;
        std::set<UseEntry> ref_use;
        for (const auto& st : body->body->body) {
            switch (st->kind) {
                case StmtKind::VarDecl:
                case StmtKind::Return:
                case StmtKind::ExprStmt:
                    if (st->value) collect_reads(*st->value, ref_def, ref_use);
                    break;
                case StmtKind::Assign:
                    collect_reads(*st->value, ref_def, ref_use);
                    if (st->target->kind == ExprKind::FieldAccess &&
                        !ref_def.count(st->target->decl))
                        ref_def[st->target->decl] = st->target->loc;
                    break;
                default:
                    return "seed " + std::to_string(seed) + ": unexpected statement kind";
            }
        }

        FunctionSummary sum = explore_function(*body, prog, EngineConfig{});
        if (sum.def_set != ref_def)
            return "seed " + std::to_string(seed) + ": def sets differ";
        if (sum.use_without_def_set != ref_use)
            return "seed " + std::to_string(seed) + ": use-without-def sets differ";
    }
    return "";
}

// ---------------------------------------------------------------------------
// 7. Determinism: 1 vs 8 jobs over the full corpus produce byte-identical
//    output trees; rerunning in place rewrites identical bytes.
// ---------------------------------------------------------------------------

std::string crit7() {
    fs::path a = g_scratch / "c7a";
    fs::path b = g_scratch / "c7b";
    run_corpus(g_source_dir / "corpus", a, 1);
    run_corpus(g_source_dir / "corpus", b, 8);
    std::string d = diff_keys(snapshot(a, {"timing.json"}), snapshot(b, {"timing.json"}));
    if (!d.empty()) return "jobs 1 vs 8: " + d;

    // Second pass over an existing output directory: cache hits, same bytes.
    auto before = snapshot(a, {"timing.json", "summary.json"});
    run_corpus(g_source_dir / "corpus", a, 8);
    auto after = snapshot(a, {"timing.json", "summary.json"});
    d = diff_keys(before, after);
    if (!d.empty()) return "rerun not idempotent: " + d;
    return "";
}

// ---------------------------------------------------------------------------
// 8. Incrementality: touching 1 of 20 units re-analyzes exactly that unit,
//    and all analysis outputs are byte-identical.
// ---------------------------------------------------------------------------

std::string crit8() {
    fs::path srcdir = g_scratch / "c8-src";
    fs::copy(g_source_dir / "fixtures/incr20", srcdir, fs::copy_options::recursive);
    fs::path out = g_scratch / "c8-out";

    int rc = run_cli("run --manifest " + (srcdir / "manifest.json").string() + " --out " +
                     out.string() + " --exit-zero");
    if (rc != 0) return "first run exit " + std::to_string(rc);
    json s1 = json::parse(slurp(out / "summary.json"));
    int analyzed1 = 0;
    for (const auto& u : s1["units"])
        if (u["status"] == "analyzed") ++analyzed1;
    if (analyzed1 != 20) return "first run analyzed " + std::to_string(analyzed1) + " of 20";
    auto before = snapshot(out, {"timing.json", "summary.json"});

    append_newline(srcdir / "u07.mo");
    rc = run_cli("run --manifest " + (srcdir / "manifest.json").string() + " --out " +
                 out.string() + " --exit-zero");
    if (rc != 0) return "second run exit " + std::to_string(rc);
    json s2 = json::parse(slurp(out / "summary.json"));
    std::vector<std::string> reanalyzed;
    int cached = 0;
    for (const auto& u : s2["units"]) {
        if (u["status"] == "analyzed") reanalyzed.push_back(u["unit"].get<std::string>());
        if (u["status"] == "cache_hit") ++cached;
    }
    if (reanalyzed.size() != 1 || reanalyzed[0] != "u07")
        return "expected exactly u07 re-analyzed, got " + std::to_string(reanalyzed.size()) +
               " unit(s)";
    if (cached != 19) return "expected 19 cache hits, got " + std::to_string(cached);

    auto after = snapshot(out, {"timing.json", "summary.json"});
    std::string d = diff_keys(before, after);
    if (!d.empty()) return "outputs changed after touch: " + d;
    return "";
}

// ---------------------------------------------------------------------------
// 9. Timing decomposition: total analysis cost is the sum of its stages, the
//    mean per-query time is total stage-2 time over query count, and the full
//    corpus finishes inside the budget.
// ---------------------------------------------------------------------------

std::string crit9() {
    if (!g_corpus_ran) return "corpus run unavailable (criterion 4 did not execute)";
    const Timing& t = g_corpus_result.timing;
    if (t.n_t_ns <= 0) return "no build-time baseline measured";
    if (t.ta_x != t.sa_x + t.wpa_x) return "ta_x != sa_x + wpa_x";
    if (t.queries > 0 && t.wp_avg_t_ns != t.wpa_ns / t.queries)
        return "wp_avg_t_ns != wpa_ns / queries";

    json tj = json::parse(slurp(g_corpus_out / "timing.json"));
    double ta = tj["ta_x"].get<double>();
    double sa = tj["sa_x"].get<double>();
    double wpa = tj["wpa_x"].get<double>();
    if (ta != sa + wpa) return "serialized ta_x != sa_x + wpa_x";
    int64_t q = tj["queries"].get<int64_t>();
    if (q > 0 && tj["wp_avg_t_ns"].get<int64_t>() != tj["wpa_ns"].get<int64_t>() / q)
        return "serialized wp_avg_t_ns != wpa_ns / queries";

    if (g_corpus_secs >= 60.0)
        return "full corpus took " + std::to_string(g_corpus_secs) + "s (budget 60s)";
    return "";
}

struct Criterion {
    int num;
    const char* name;
    std::string (*fn)();
};

}  // namespace

int main() {
    g_source_dir = fs::path(MOA_SOURCE_DIR);
    g_scratch = fs::temp_directory_path() / "moa-acceptance";
    fs::remove_all(g_scratch);
    fs::create_directories(g_scratch);

    const Criterion criteria[] = {
        {1, "running example end to end", crit1},
        {2, "fixed constructor classified false positive", crit2},
        {3, "reference-alias store toggles the verdict", crit3},
        {4, "oracle-labeled corpus matches committed rates", crit4},
        {5, "call-graph soundness on random hierarchies", crit5},
        {6, "summaries equal straight-line gen-kill", crit6},
        {7, "parallel determinism and idempotence", crit7},
        {8, "incremental re-analysis touches one unit", crit8},
        {9, "timing decomposition and corpus budget", crit9},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        std::string why;
        try {
            why = c.fn();
        } catch (const std::exception& e) {
            why = e.what();
        }
        bool ok = why.empty();
        std::printf("criterion %d: %-48s %s\n", c.num, c.name, ok ? "PASS" : "FAIL");
        if (!ok) {
            std::printf("  reason: %s\n", why.c_str());
            ++failed;
        }
    }
    if (failed > 0) std::printf("%d of 9 criteria failed\n", failed);
    else std::printf("all 9 criteria passed\n");
    return failed == 0 ? 0 : 1;
}
