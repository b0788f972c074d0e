// Labeled-corpus harness: runs the full pipeline over bad/good cases, checks
// the labels and the pipeline against the concrete-execution oracle, and
// produces per-weakness detection-rate tables.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "moa/driver.hpp"

namespace moa {

struct SiteExpectation {
    int cwe = 0;
    DeclID function;  // flaw site is matched within this function's extent
    bool should_flag = false;
};

struct CorpusCase {
    std::string cwe_dir;  // e.g. "cwe457"
    std::string id;
    std::string variant;  // "bad" | "good"
    std::filesystem::path dir;
    std::vector<SiteExpectation> sites;
    int oracle_inputs = 0;  // extern_input arity the case was designed for
};

struct CweCounts {
    int tp = 0, fp = 0, tn = 0, fn = 0;
    double tpr() const { return tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0; }
    double fpr() const { return fp + tn > 0 ? static_cast<double>(fp) / (fp + tn) : 0.0; }
};

struct CaseOutcome {
    std::string cwe_dir;
    std::string id;
    std::string variant;
    bool oracle_agrees = true;    // committed labels match oracle ground truth
    bool pipeline_covers = true;  // every oracle-found site is flagged
    std::vector<std::string> notes;
};

struct BenchResult {
    std::map<std::string, CweCounts> per_cwe;
    std::vector<CaseOutcome> cases;
    std::vector<std::string> errors;
    Timing timing;
};

std::vector<CorpusCase> load_corpus(const std::filesystem::path& corpus_dir);

// Runs every case (pipeline outputs under out_dir/<cwe>/<case>), counting
// detection per the labels and cross-checking against the oracle.
BenchResult run_corpus(const std::filesystem::path& corpus_dir,
                       const std::filesystem::path& out_dir, int jobs);

// Counts and rates only — the golden-file payload (timing varies by host).
std::string bench_results_json(const BenchResult& r);
std::string bench_results_text(const BenchResult& r);

}  // namespace moa
