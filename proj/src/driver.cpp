#include "moa/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "moa/checkers.hpp"
#include "moa/frontend.hpp"
#include "moa/hashutil.hpp"
#include "moa/reports.hpp"

namespace moa {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int64_t ns_since(Clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

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

std::string source_line(const std::string& content, int line) {
    std::istringstream in(content);
    std::string l;
    for (int i = 0; i < line && std::getline(in, l); ++i) {
    }
    return l;
}

// Everything stage 1 needs, resolved from the manifest plus CLI overrides.
struct Project {
    fs::path manifest_dir;
    fs::path out;
    fs::path cache_dir;
    std::vector<fs::path> unit_paths;       // absolute, manifest order
    std::vector<std::string> unit_names;    // stems, same order
    std::vector<DeclID> manifest_entries;   // before main-defaulting
    std::vector<std::string> checkers;
    EngineConfig engine;
    WpaOptions wpa;
    bool exit_zero = false;
    int jobs = 1;
};

Project load_project(const DriverConfig& cfg) {
    Project p;
    fs::path mpath = cfg.manifest_path;
    json m;
    try {
        m = json::parse(slurp(mpath));
    } catch (const json::exception& e) {
        throw std::runtime_error("invalid manifest: " + std::string(e.what()));
    }
    p.manifest_dir = fs::absolute(mpath).parent_path();

    if (!m.contains("units") || !m["units"].is_array() || m["units"].empty())
        throw std::runtime_error("invalid manifest: 'units' must be a non-empty array");
    std::set<std::string> seen;
    for (const auto& u : m["units"]) {
        fs::path up = p.manifest_dir / u.get<std::string>();
        if (!fs::exists(up))
            throw std::runtime_error("invalid manifest: unit does not exist: " + up.string());
        std::string name = unit_name_from_path(up.string());
        if (!seen.insert(name).second)
            throw std::runtime_error("invalid manifest: duplicate unit name: " + name);
        p.unit_paths.push_back(up);
        p.unit_names.push_back(name);
    }

    if (m.contains("entries")) p.manifest_entries = m["entries"].get<std::vector<DeclID>>();
    p.checkers = m.contains("checkers") ? m["checkers"].get<std::vector<std::string>>()
                                        : all_checker_ids();
    if (m.contains("engine")) {
        const auto& e = m["engine"];
        if (e.contains("path_budget")) p.engine.path_budget = e["path_budget"].get<int64_t>();
        if (e.contains("loop_bound")) p.engine.loop_bound = e["loop_bound"].get<int>();
        if (e.contains("inline_depth")) p.engine.inline_depth = e["inline_depth"].get<int>();
        if (e.contains("step_budget")) p.engine.step_budget = e["step_budget"].get<int64_t>();
    }
    if (m.contains("wpa")) {
        const auto& w = m["wpa"];
        if (w.contains("chain_cap")) p.wpa.chain_cap = w["chain_cap"].get<int>();
        if (w.contains("max_depth")) p.wpa.max_depth = w["max_depth"].get<int>();
        if (w.contains("resolve_ref_aliases"))
            p.wpa.resolve_ref_aliases = w["resolve_ref_aliases"].get<bool>();
    }
    p.out = m.contains("out") ? p.manifest_dir / m["out"].get<std::string>()
                              : p.manifest_dir / "out";

    // Command-line overrides.
    if (cfg.path_budget) p.engine.path_budget = *cfg.path_budget;
    if (cfg.loop_bound) p.engine.loop_bound = *cfg.loop_bound;
    if (cfg.chain_cap) p.wpa.chain_cap = *cfg.chain_cap;
    if (cfg.resolve_ref_aliases) p.wpa.resolve_ref_aliases = *cfg.resolve_ref_aliases;
    if (cfg.checkers) p.checkers = *cfg.checkers;
    if (cfg.out_dir) p.out = fs::absolute(*cfg.out_dir);
    p.exit_zero = cfg.exit_zero;
    p.jobs = cfg.jobs > 0 ? cfg.jobs : 1;

    if (const char* env = std::getenv("ANALYZER_CACHE_DIR"))
        p.cache_dir = fs::path(env);
    else
        p.cache_dir = p.out / "cache";
    return p;
}

// Leading `import x;` lines of a source file, read without a full parse so
// cache keys can be computed before any analysis work.
std::vector<std::string> scan_imports(const std::string& src) {
    std::vector<std::string> out;
    std::istringstream in(src);
    std::string line;
    while (std::getline(in, line)) {
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;  // blank
        if (line.compare(b, 7, "import ") != 0) break;
        size_t e = line.find(';', b);
        if (e == std::string::npos) break;
        std::string name = line.substr(b + 7, e - b - 7);
        name.erase(0, name.find_first_not_of(" \t"));
        name.erase(name.find_last_not_of(" \t") + 1);
        out.push_back(name);
    }
    return out;
}

// The unit itself plus its transitive imports, as indices into the project's
// unit list, in breadth-first discovery order.
std::vector<size_t> import_closure(const Project& p, const std::vector<std::string>& contents,
                                   size_t root) {
    std::map<std::string, size_t> by_name;
    for (size_t i = 0; i < p.unit_names.size(); ++i) by_name[p.unit_names[i]] = i;

    std::vector<size_t> order{root};
    std::set<size_t> seen{root};
    for (size_t at = 0; at < order.size(); ++at) {
        for (const auto& imp : scan_imports(contents[order[at]])) {
            auto it = by_name.find(imp);
            if (it != by_name.end() && seen.insert(it->second).second)
                order.push_back(it->second);
        }
    }
    return order;
}

std::string stage1_fingerprint(const Project& p) {
    json j;
    j["checkers"] = p.checkers;
    j["path_budget"] = p.engine.path_budget;
    j["loop_bound"] = p.engine.loop_bound;
    j["inline_depth"] = p.engine.inline_depth;
    j["step_budget"] = p.engine.step_budget;
    return j.dump();
}

struct Stage1Result {
    UnitOutcome outcome;
    std::vector<CandidateReport> reports;
    std::optional<UnitIR> ir;
    bool truncated = false;
    int64_t paths_explored = 0;
    int64_t build_ns = 0;    // parse + lower
    int64_t analyze_ns = 0;  // explore + check
};

json candidate_to_obj(const CandidateReport& r) { return json::parse(candidate_json(r)); }

Stage1Result analyze_one_unit(const Project& p, const std::vector<std::string>& contents,
                              size_t idx, const std::string& fingerprint) {
    Stage1Result res;
    res.outcome.unit = p.unit_names[idx];

    auto closure = import_closure(p, contents, idx);
    std::string key_material = "stage1-cache-v1\n" + fingerprint + "\n";
    {
        // Hash closure files in name order so the key is order-independent.
        std::vector<size_t> sorted = closure;
        std::sort(sorted.begin(), sorted.end(),
                  [&](size_t a, size_t b) { return p.unit_names[a] < p.unit_names[b]; });
        for (size_t i : sorted)
            key_material += p.unit_names[i] + "\n" + contents[i] + "\n";
    }
    std::string key = sha256_hex(key_material);
    fs::path entry_path = p.cache_dir / (key + ".json");

    if (fs::exists(entry_path)) {
        try {
            json entry = json::parse(slurp(entry_path));
            res.outcome.status = "cache_hit";
            res.outcome.errors = entry.at("errors").get<std::vector<std::string>>();
            if (!res.outcome.errors.empty()) res.outcome.status = "error";
            res.truncated = entry.at("truncated").get<bool>();
            res.paths_explored = entry.at("paths_explored").get<int64_t>();
            for (const auto& r : entry.at("reports")) {
                res.reports.push_back(candidate_from_json(r.dump()));
                res.outcome.report_ids.push_back(res.reports.back().id);
            }
            if (entry.contains("ir") && !entry["ir"].is_null())
                res.ir = unit_ir_from_json(entry["ir"].dump());
            if (res.outcome.errors.empty()) res.outcome.status = "cache_hit";
            return res;
        } catch (const std::exception&) {
            // Corrupt entry: fall through and re-analyze.
        }
    }

    // Parse the unit with its imports.
    auto t0 = Clock::now();
    DiagList diags;
    std::vector<std::pair<std::string, std::string>> sources;
    for (size_t i : closure) sources.emplace_back(p.unit_paths[i].filename().string(), contents[i]);
    ProgramAST prog = analyze_sources(sources, diags);
    res.build_ns += ns_since(t0);

    if (!diags.empty()) {
        res.outcome.status = "error";
        for (const auto& d : diags) res.outcome.errors.push_back(d.str());
    } else {
        auto t1 = Clock::now();
        UnitAnalysis ua = analyze_unit(prog, p.unit_names[idx], p.engine, p.checkers);
        res.analyze_ns += ns_since(t1);
        res.truncated = ua.truncated;
        res.paths_explored = ua.paths_explored;
        for (const auto& f : ua.findings) {
            res.reports.push_back(make_candidate(f, ua.truncated, ua.paths_explored));
            res.outcome.report_ids.push_back(res.reports.back().id);
        }
        auto t2 = Clock::now();
        res.ir = lower_unit(prog, p.unit_names[idx]);
        res.build_ns += ns_since(t2);
        res.outcome.status = "analyzed";
    }

    json entry;
    entry["unit"] = p.unit_names[idx];
    entry["errors"] = res.outcome.errors;
    entry["truncated"] = res.truncated;
    entry["paths_explored"] = res.paths_explored;
    entry["reports"] = json::array();
    for (const auto& r : res.reports) entry["reports"].push_back(candidate_to_obj(r));
    entry["ir"] = res.ir ? json::parse(unit_ir_to_json(*res.ir)) : json();
    spill(entry_path, entry.dump(2) + "\n");
    return res;
}

void run_parallel(int jobs, size_t count, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int n = std::min<size_t>(jobs, count);
    for (int t = 0; t < n; ++t)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

void write_timing(const Project& p, Timing& t) {
    t.sa_x = t.n_t_ns > 0 ? static_cast<double>(t.sa_ns) / t.n_t_ns : 0.0;
    t.wpa_x = t.n_t_ns > 0 ? static_cast<double>(t.wpa_ns) / t.n_t_ns : 0.0;
    t.ta_x = t.sa_x + t.wpa_x;
    t.wp_avg_t_ns = t.queries > 0 ? t.wpa_ns / t.queries : 0;
    json j;
    j["n_t_ns"] = t.n_t_ns;
    j["sa_ns"] = t.sa_ns;
    j["wpa_ns"] = t.wpa_ns;
    j["queries"] = t.queries;
    j["sa_x"] = t.sa_x;
    j["wpa_x"] = t.wpa_x;
    j["ta_x"] = t.ta_x;
    j["wp_avg_t_ns"] = t.wp_avg_t_ns;
    spill(p.out / "timing.json", j.dump(2) + "\n");
}

void write_summary(const Project& p, const RunSummary& s) {
    json j;
    j["candidates"] = s.candidates;
    j["confirmed"] = s.confirmed;
    j["false_positives"] = s.false_positives;
    j["units"] = json::array();
    for (const auto& u : s.units) {
        json uj;
        uj["unit"] = u.unit;
        uj["status"] = u.status;
        uj["reports"] = u.report_ids;
        if (!u.errors.empty()) uj["errors"] = u.errors;
        j["units"].push_back(std::move(uj));
    }
    j["errors"] = s.errors;
    j["exit_code"] = s.exit_code;
    spill(p.out / "summary.json", j.dump(2) + "\n");
}

// Stage 1 over all units. Analysis runs in parallel; all file writes happen
// afterwards on the calling thread, in unit order, so output is identical
// for any job count.
void stage1_into(const Project& p, RunSummary& summary, Timing& timing) {
    std::vector<std::string> contents;
    for (const auto& up : p.unit_paths) contents.push_back(slurp(up));
    std::string fingerprint = stage1_fingerprint(p);

    std::vector<Stage1Result> results(p.unit_paths.size());
    run_parallel(p.jobs, p.unit_paths.size(), [&](size_t i) {
        results[i] = analyze_one_unit(p, contents, i, fingerprint);
    });

    for (size_t i = 0; i < results.size(); ++i) {
        Stage1Result& r = results[i];
        timing.n_t_ns += r.build_ns;
        timing.sa_ns += r.analyze_ns;
        summary.units.push_back(r.outcome);
        for (const auto& e : r.outcome.errors)
            summary.errors.push_back(r.outcome.unit + ": " + e);

        for (const auto& rep : r.reports) {
            summary.candidates += 1;
            spill(p.out / "reports" / ("report-" + rep.id + ".json"), candidate_json(rep));
            spill(p.out / "reports" / ("report-" + rep.id + ".txt"),
                  candidate_text(rep, source_line(contents[i], rep.loc.line)));
        }
        if (r.ir)
            spill(p.out / "ir" / (p.unit_names[i] + ".mir.json"), unit_ir_to_json(*r.ir));
    }

    if (!summary.errors.empty()) summary.exit_code = 2;
}

// Links the IR written by stage 1 and validates every on-disk candidate.
void stage2_into(const Project& p, RunSummary& summary, Timing& timing) {
    summary.confirmed = 0;

    auto t0 = Clock::now();
    std::vector<UnitIR> units;
    for (const auto& name : p.unit_names) {
        fs::path ip = p.out / "ir" / (name + ".mir.json");
        if (!fs::exists(ip)) {
            summary.errors.push_back("missing stage-1 output: " + ip.string());
            continue;
        }
        units.push_back(unit_ir_from_json(slurp(ip)));
    }
    if (!summary.errors.empty()) {
        summary.exit_code = 2;
        return;
    }

    // Entries can only be validated against the linked symbol table, so look
    // for a provisional main first.
    std::vector<DeclID> entries = p.manifest_entries;
    {
        bool has_main = false;
        for (const auto& u : units)
            for (const auto& f : u.functions)
                if (f.id == "main") has_main = true;
        if (has_main && std::find(entries.begin(), entries.end(), "main") == entries.end())
            entries.insert(entries.begin(), "main");
    }
    if (entries.empty()) {
        summary.errors.push_back("no entry points: no main and no manifest entries");
        summary.exit_code = 2;
        return;
    }

    LinkResult linked = link_units(units, entries);
    if (!linked.errors.empty()) {
        for (const auto& e : linked.errors) summary.errors.push_back("link: " + e);
        summary.exit_code = 2;
        return;
    }
    const ProgramIR& prog = *linked.program;
    spill(p.out / "ir" / "program.mir.json", program_ir_to_json(prog));

    CallGraph cg = build_callgraph(prog);
    devirtualize_cha(prog, cg);
    resolve_indirect(prog, cg);
    rta_prune(prog, cg, entries);
    timing.wpa_ns += ns_since(t0);

    // Queries come from the candidate reports on disk.
    std::vector<std::string> report_files;
    fs::path rdir = p.out / "reports";
    if (fs::exists(rdir))
        for (const auto& de : fs::directory_iterator(rdir)) {
            std::string name = de.path().filename().string();
            if (name.rfind("report-", 0) == 0 && name.find("wp-report-") == std::string::npos &&
                de.path().extension() == ".json")
                report_files.push_back(de.path().string());
        }
    std::sort(report_files.begin(), report_files.end());

    std::vector<WPQuery> queries;
    int non457 = 0;
    for (const auto& f : report_files) {
        std::string text = slurp(f);
        CandidateReport r;
        try {
            r = candidate_from_json(text);
        } catch (const std::exception& e) {
            summary.errors.push_back(fs::path(f).filename().string() + ": " + e.what());
            continue;
        }
        if (r.cwe != 457) {
            non457 += 1;
            continue;
        }
        try {
            queries.push_back(parse_candidate(text, prog));
        } catch (const std::exception& e) {
            summary.errors.push_back("report-" + r.id + ": " + e.what());
        }
    }
    spill(p.out / "queries.json", queries_json(queries));

    std::vector<WPReport> wps(queries.size());
    std::vector<int64_t> query_ns(queries.size(), 0);
    run_parallel(p.jobs, queries.size(), [&](size_t i) {
        auto q0 = Clock::now();
        WpaVerdict v = validate_garbage_read(prog, cg, queries[i].field,
                                             queries[i].anchor_function, entries, p.wpa);
        query_ns[i] = ns_since(q0);
        wps[i] = make_wp_report(queries[i], v, entries);
    });

    for (size_t i = 0; i < wps.size(); ++i) {
        timing.wpa_ns += query_ns[i];
        timing.queries += 1;
        if (wps[i].status == "Confirmed")
            summary.confirmed += 1;
        else
            summary.false_positives += 1;
        spill(p.out / "reports" / ("wp-report-" + wps[i].report_id + ".json"),
              wp_report_json(wps[i]));
        spill(p.out / "reports" / ("wp-report-" + wps[i].report_id + ".txt"),
              wp_report_text(wps[i]));
    }

    if (!summary.errors.empty())
        summary.exit_code = 2;
    else if (!p.exit_zero && summary.confirmed + non457 > 0)
        summary.exit_code = 1;
}

}  // namespace

RunSummary run_stage1(const DriverConfig& cfg) {
    Project p = load_project(cfg);
    RunSummary summary;
    Timing timing;
    stage1_into(p, summary, timing);
    summary.timing = timing;
    write_timing(p, summary.timing);
    write_summary(p, summary);
    return summary;
}

RunSummary run_stage2(const DriverConfig& cfg) {
    Project p = load_project(cfg);
    RunSummary summary;
    Timing timing;

    // Candidate totals come from the reports directory.
    fs::path rdir = p.out / "reports";
    if (fs::exists(rdir))
        for (const auto& de : fs::directory_iterator(rdir)) {
            std::string name = de.path().filename().string();
            if (name.rfind("report-", 0) == 0 && de.path().extension() == ".json")
                summary.candidates += 1;
        }

    stage2_into(p, summary, timing);
    summary.timing = timing;
    write_timing(p, summary.timing);
    write_summary(p, summary);
    return summary;
}

RunSummary run_all(const DriverConfig& cfg) {
    Project p = load_project(cfg);
    RunSummary summary;
    Timing timing;

    stage1_into(p, summary, timing);
    if (summary.exit_code == 0) {
        stage2_into(p, summary, timing);
    } else {
        summary.confirmed = 0;
    }
    summary.timing = timing;
    write_timing(p, summary.timing);
    write_summary(p, summary);
    return summary;
}

}  // namespace moa
