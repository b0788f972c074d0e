#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moa/bench.hpp"
#include "moa/driver.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    size_t at = 0;
    while (at <= s.size()) {
        size_t comma = s.find(',', at);
        if (comma == std::string::npos) comma = s.size();
        std::string piece = s.substr(at, comma - at);
        if (!piece.empty()) out.push_back(piece);
        at = comma + 1;
    }
    return out;
}

struct StageArgs {
    std::string manifest;
    int jobs = 1;
    int64_t path_budget = 0;
    int loop_bound = 0;
    int chain_cap = 0;
    bool resolve_ref_aliases = false;
    std::string checkers;
    std::string out;
    bool exit_zero = false;

    CLI::Option* path_budget_opt = nullptr;
    CLI::Option* loop_bound_opt = nullptr;
    CLI::Option* chain_cap_opt = nullptr;
    CLI::Option* alias_opt = nullptr;
    CLI::Option* checkers_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_stage_options(CLI::App* sub, StageArgs& a) {
    sub->add_option("--manifest", a.manifest, "Project manifest (JSON)")->required();
    sub->add_option("--jobs", a.jobs, "Worker threads");
    a.path_budget_opt = sub->add_option("--path-budget", a.path_budget, "Max explored paths per function");
    a.loop_bound_opt = sub->add_option("--loop-bound", a.loop_bound, "Loop unrolling bound");
    a.chain_cap_opt = sub->add_option("--chain-cap", a.chain_cap, "Max call chains examined per query");
    a.alias_opt = sub->add_flag("--resolve-ref-aliases", a.resolve_ref_aliases,
                                "Credit single-hop stores through by-reference parameters");
    a.checkers_opt = sub->add_option("--checkers", a.checkers, "Comma-separated checker ids");
    a.out_opt = sub->add_option("--out", a.out, "Output directory (overrides the manifest)");
    sub->add_flag("--exit-zero", a.exit_zero, "Return 0 even when findings remain");
}

moa::DriverConfig to_config(const StageArgs& a) {
    moa::DriverConfig cfg;
    cfg.manifest_path = a.manifest;
    cfg.jobs = a.jobs;
    cfg.exit_zero = a.exit_zero;
    if (a.path_budget_opt->count()) cfg.path_budget = a.path_budget;
    if (a.loop_bound_opt->count()) cfg.loop_bound = a.loop_bound;
    if (a.chain_cap_opt->count()) cfg.chain_cap = a.chain_cap;
    if (a.alias_opt->count()) cfg.resolve_ref_aliases = true;
    if (a.checkers_opt->count()) cfg.checkers = split_list(a.checkers);
    if (a.out_opt->count()) cfg.out_dir = a.out;
    return cfg;
}

void print_summary(const moa::RunSummary& s, bool ran_stage1, bool ran_stage2) {
    if (ran_stage1) {
        int analyzed = 0, cached = 0, failed = 0;
        for (const auto& u : s.units) {
            if (u.status == "analyzed") ++analyzed;
            else if (u.status == "cache_hit") ++cached;
            else ++failed;
            std::cout << "unit " << u.unit << ": " << u.status;
            if (!u.report_ids.empty()) std::cout << " (" << u.report_ids.size() << " report"
                                                 << (u.report_ids.size() == 1 ? "" : "s") << ")";
            std::cout << "\n";
        }
        std::cout << "stage 1: " << analyzed << " analyzed, " << cached << " cached, " << failed
                  << " failed; " << s.candidates << " candidate report"
                  << (s.candidates == 1 ? "" : "s") << "\n";
    }
    if (ran_stage2 && s.exit_code != 2) {
        std::cout << "stage 2: " << s.timing.queries << " quer"
                  << (s.timing.queries == 1 ? "y" : "ies") << " validated: " << s.confirmed
                  << " confirmed, " << s.false_positives << " false positive"
                  << (s.false_positives == 1 ? "" : "s") << "\n";
    }
    for (const auto& e : s.errors) std::cerr << "error: " << e << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Staged static analyzer for MiniObj programs"};
    app.require_subcommand(1);

    StageArgs run_a, s1_a, s2_a;
    CLI::App* run_cmd = app.add_subcommand("run", "Stage 1 and stage 2 end to end");
    CLI::App* s1_cmd = app.add_subcommand("stage1", "Per-unit analysis and candidate reports");
    CLI::App* s2_cmd = app.add_subcommand("stage2", "Whole-program validation of candidates");
    add_stage_options(run_cmd, run_a);
    add_stage_options(s1_cmd, s1_a);
    add_stage_options(s2_cmd, s2_a);

    std::string corpus, bench_out = "bench-out";
    int bench_jobs = 1;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Run the labeled corpus and report rates");
    bench_cmd->add_option("--corpus", corpus, "Corpus root directory")->required();
    bench_cmd->add_option("--out", bench_out, "Output directory");
    bench_cmd->add_option("--jobs", bench_jobs, "Worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bench_cmd) {
            moa::BenchResult r = moa::run_corpus(corpus, bench_out, bench_jobs);
            std::cout << moa::bench_results_text(r);
            for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
            return r.errors.empty() ? 0 : 2;
        }
        if (*run_cmd) {
            moa::RunSummary s = moa::run_all(to_config(run_a));
            print_summary(s, true, true);
            return s.exit_code;
        }
        if (*s1_cmd) {
            moa::RunSummary s = moa::run_stage1(to_config(s1_a));
            print_summary(s, true, false);
            return s.exit_code;
        }
        moa::RunSummary s = moa::run_stage2(to_config(s2_a));
        print_summary(s, false, true);
        return s.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
