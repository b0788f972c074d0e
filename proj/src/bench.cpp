#include "moa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "moa/frontend.hpp"
#include "moa/oracle.hpp"
#include "moa/reports.hpp"

namespace moa {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

struct FlaggedSite {
    int cwe = 0;
    SourceLoc loc;
};

// A flaw site "matches" an expectation when it sits inside the named
// function's source extent and reports the same weakness class.
bool within_extent(const ProgramAST& prog, const DeclID& function, const SourceLoc& loc) {
    const FunctionDecl* f = prog.find_function(function);
    if (!f) return false;
    return f->loc.file == loc.file && loc.line >= f->loc.line && loc.line <= f->end_loc.line;
}

// Everything the pipeline flagged for one case: stage-1 candidates for the
// conversion/type checkers, stage-2 Confirmed reports for garbage reads.
std::vector<FlaggedSite> collect_flagged(const fs::path& case_out) {
    std::vector<FlaggedSite> flagged;
    fs::path rdir = case_out / "reports";
    if (!fs::exists(rdir)) return flagged;

    std::map<std::string, CandidateReport> candidates;
    std::set<std::string> confirmed;
    for (const auto& de : fs::directory_iterator(rdir)) {
        std::string name = de.path().filename().string();
        if (de.path().extension() != ".json") continue;
        if (name.rfind("wp-report-", 0) == 0) {
            WPReport wp = wp_report_from_json(slurp(de.path()));
            if (wp.status == "Confirmed") confirmed.insert(wp.report_id);
        } else if (name.rfind("report-", 0) == 0) {
            CandidateReport r = candidate_from_json(slurp(de.path()));
            candidates[r.id] = r;
        }
    }
    for (const auto& [id, r] : candidates) {
        if (r.cwe == 457 && !confirmed.count(id)) continue;
        flagged.push_back({r.cwe, r.loc});
    }
    return flagged;
}

struct PerCase {
    CaseOutcome outcome;
    CweCounts counts;
    std::vector<std::string> errors;
    Timing timing;
};

PerCase run_case(const CorpusCase& c, const fs::path& out_root) {
    PerCase pc;
    pc.outcome.cwe_dir = c.cwe_dir;
    pc.outcome.id = c.id;
    pc.outcome.variant = c.variant;

    fs::path case_out = out_root / c.cwe_dir / c.id;
    std::string label = c.cwe_dir + "/" + c.id;

    // Full pipeline over the case.
    DriverConfig cfg;
    cfg.manifest_path = c.dir / "manifest.json";
    cfg.out_dir = case_out;
    cfg.exit_zero = true;
    RunSummary summary;
    try {
        summary = run_all(cfg);
    } catch (const std::exception& e) {
        pc.errors.push_back(label + ": " + e.what());
    }
    for (const auto& e : summary.errors) pc.errors.push_back(label + ": " + e);
    pc.timing = summary.timing;

    bool broken = !pc.errors.empty();
    std::vector<FlaggedSite> flagged;
    if (!broken) flagged = collect_flagged(case_out);

    // Ground truth: parse the case and run the oracle from its entry points.
    ProgramAST prog;
    std::vector<OracleDefect> oracle_sites;
    if (!broken) {
        try {
            json m = json::parse(slurp(c.dir / "manifest.json"));
            std::vector<std::pair<std::string, std::string>> sources;
            for (const auto& u : m.at("units")) {
                fs::path up = c.dir / u.get<std::string>();
                sources.emplace_back(up.filename().string(), slurp(up));
            }
            DiagList diags;
            prog = analyze_sources(sources, diags);
            if (!diags.empty()) throw std::runtime_error(diags.front().str());

            std::vector<DeclID> entries;
            if (m.contains("entries")) entries = m["entries"].get<std::vector<DeclID>>();
            if (entries.empty()) entries.push_back("main");
            for (const auto& e : entries) {
                OracleResult orc = oracle_enumerate(prog, e);
                if (!orc.completed) {
                    pc.outcome.oracle_agrees = false;
                    pc.outcome.notes.push_back("oracle hit the step limit");
                }
                for (const auto& d : orc.defects) oracle_sites.push_back(d);
            }
        } catch (const std::exception& e) {
            pc.errors.push_back(label + ": " + e.what());
            broken = true;
        }
    }

    if (broken) {
        // A case the pipeline cannot process gives no detection signal.
        pc.outcome.oracle_agrees = false;
        pc.outcome.pipeline_covers = false;
        if (c.variant == "bad")
            for (const auto& s : c.sites)
                if (s.should_flag) pc.counts.fn += 1;
        return pc;
    }

    // Label validation: bad sites must be reachable defects per the oracle,
    // good cases must execute clean on every input.
    if (c.variant == "bad") {
        for (const auto& s : c.sites) {
            if (!s.should_flag) continue;
            bool oracle_hit = false;
            for (const auto& d : oracle_sites)
                if (d.cwe == s.cwe && within_extent(prog, s.function, d.loc)) oracle_hit = true;
            if (!oracle_hit) {
                pc.outcome.oracle_agrees = false;
                pc.outcome.notes.push_back("label not confirmed by oracle: " + s.function);
            }
        }
    } else if (!oracle_sites.empty()) {
        pc.outcome.oracle_agrees = false;
        pc.outcome.notes.push_back("oracle found a defect in a good case");
    }

    // Coverage: every oracle-observed site must be flagged at the same line.
    for (const auto& d : oracle_sites) {
        bool hit = false;
        for (const auto& f : flagged)
            if (f.cwe == d.cwe && f.loc.file == d.loc.file && f.loc.line == d.loc.line) hit = true;
        if (!hit) {
            pc.outcome.pipeline_covers = false;
            pc.outcome.notes.push_back("missed oracle site: " + d.loc.str());
        }
    }

    // Detection counting against the committed labels.
    if (c.variant == "bad") {
        for (const auto& s : c.sites) {
            if (!s.should_flag) continue;
            bool matched = false;
            for (const auto& f : flagged)
                if (f.cwe == s.cwe && within_extent(prog, s.function, f.loc)) matched = true;
            if (matched)
                pc.counts.tp += 1;
            else
                pc.counts.fn += 1;
        }
    } else {
        if (flagged.empty()) {
            pc.counts.tn += 1;
        } else {
            pc.counts.fp += 1;
            for (const auto& f : flagged)
                pc.outcome.notes.push_back("flagged clean code: cwe" + std::to_string(f.cwe) +
                                           " at " + f.loc.str());
        }
    }
    return pc;
}

void pool_run(int jobs, size_t count, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    size_t n = std::min(static_cast<size_t>(jobs), count);
    for (size_t t = 0; t < n; ++t)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<CorpusCase> load_corpus(const fs::path& corpus_dir) {
    std::vector<CorpusCase> cases;
    if (!fs::exists(corpus_dir))
        throw std::runtime_error("corpus directory not found: " + corpus_dir.string());

    std::vector<fs::path> cwe_dirs;
    for (const auto& de : fs::directory_iterator(corpus_dir))
        if (de.is_directory()) cwe_dirs.push_back(de.path());
    std::sort(cwe_dirs.begin(), cwe_dirs.end());

    for (const auto& cd : cwe_dirs) {
        std::vector<fs::path> case_dirs;
        for (const auto& de : fs::directory_iterator(cd))
            if (de.is_directory()) case_dirs.push_back(de.path());
        std::sort(case_dirs.begin(), case_dirs.end());

        for (const auto& dir : case_dirs) {
            fs::path exp = dir / "expected.json";
            if (!fs::exists(exp)) continue;
            json e = json::parse(slurp(exp));
            CorpusCase c;
            c.cwe_dir = cd.filename().string();
            c.id = dir.filename().string();
            c.dir = dir;
            c.variant = e.at("variant").get<std::string>();
            c.oracle_inputs = e.value("oracle_inputs", 0);
            for (const auto& s : e.value("sites", json::array())) {
                SiteExpectation se;
                se.cwe = s.at("cwe").get<int>();
                se.function = s.at("function").get<DeclID>();
                se.should_flag = s.at("should_flag").get<bool>();
                c.sites.push_back(se);
            }
            cases.push_back(std::move(c));
        }
    }
    return cases;
}

BenchResult run_corpus(const fs::path& corpus_dir, const fs::path& out_dir, int jobs) {
    BenchResult r;
    std::vector<CorpusCase> cases = load_corpus(corpus_dir);

    std::vector<PerCase> per(cases.size());
    pool_run(jobs, cases.size(), [&](size_t i) { per[i] = run_case(cases[i], out_dir); });

    for (size_t i = 0; i < per.size(); ++i) {
        CweCounts& agg = r.per_cwe[cases[i].cwe_dir];
        agg.tp += per[i].counts.tp;
        agg.fp += per[i].counts.fp;
        agg.tn += per[i].counts.tn;
        agg.fn += per[i].counts.fn;
        r.cases.push_back(per[i].outcome);
        for (const auto& e : per[i].errors) r.errors.push_back(e);
        r.timing.n_t_ns += per[i].timing.n_t_ns;
        r.timing.sa_ns += per[i].timing.sa_ns;
        r.timing.wpa_ns += per[i].timing.wpa_ns;
        r.timing.queries += per[i].timing.queries;
    }
    r.timing.sa_x = r.timing.n_t_ns > 0 ? static_cast<double>(r.timing.sa_ns) / r.timing.n_t_ns : 0.0;
    r.timing.wpa_x =
        r.timing.n_t_ns > 0 ? static_cast<double>(r.timing.wpa_ns) / r.timing.n_t_ns : 0.0;
    r.timing.ta_x = r.timing.sa_x + r.timing.wpa_x;
    r.timing.wp_avg_t_ns = r.timing.queries > 0 ? r.timing.wpa_ns / r.timing.queries : 0;

    spill(out_dir / "bench-results.json", bench_results_json(r));
    spill(out_dir / "bench-results.txt", bench_results_text(r));
    json t;
    t["n_t_ns"] = r.timing.n_t_ns;
    t["sa_ns"] = r.timing.sa_ns;
    t["wpa_ns"] = r.timing.wpa_ns;
    t["queries"] = r.timing.queries;
    t["sa_x"] = r.timing.sa_x;
    t["wpa_x"] = r.timing.wpa_x;
    t["ta_x"] = r.timing.ta_x;
    t["wp_avg_t_ns"] = r.timing.wp_avg_t_ns;
    spill(out_dir / "timing.json", t.dump(2) + "\n");
    return r;
}

std::string bench_results_json(const BenchResult& r) {
    json j;
    j["total_cases"] = r.cases.size();
    j["cases"] = json::array();
    for (const auto& o : r.cases) {
        json oj;
        oj["cwe"] = o.cwe_dir;
        oj["id"] = o.id;
        oj["variant"] = o.variant;
        oj["oracle_agrees"] = o.oracle_agrees;
        oj["pipeline_covers"] = o.pipeline_covers;
        oj["notes"] = o.notes;
        j["cases"].push_back(std::move(oj));
    }
    j["per_cwe"] = json::object();
    for (const auto& [cwe, c] : r.per_cwe) {
        json cj;
        cj["tp"] = c.tp;
        cj["fp"] = c.fp;
        cj["tn"] = c.tn;
        cj["fn"] = c.fn;
        cj["tpr"] = round4(c.tpr());
        cj["fpr"] = round4(c.fpr());
        j["per_cwe"][cwe] = std::move(cj);
    }
    return j.dump(2) + "\n";
}

std::string bench_results_text(const BenchResult& r) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-10s %4s %4s %4s %4s %7s %7s\n", "CWE", "TP", "FP", "TN",
                  "FN", "TPR", "FPR");
    out += buf;
    for (const auto& [cwe, c] : r.per_cwe) {
        std::snprintf(buf, sizeof(buf), "%-10s %4d %4d %4d %4d %7.3f %7.3f\n", cwe.c_str(), c.tp,
                      c.fp, c.tn, c.fn, c.tpr(), c.fpr());
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%zu weakness classes, %zu cases\n", r.per_cwe.size(),
                  r.cases.size());
    out += buf;
    return out;
}

}  // namespace moa
