// Tests for the corpus runner: label loading, detection counting against the
// concrete-execution oracle, and stability of the committed results.
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "moa/bench.hpp"

using namespace moa;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path source_dir() { return fs::path(MOA_SOURCE_DIR); }

fs::path fresh_out(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("moa-bench-test-" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("cannot open " + p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("rate math handles empty denominators") {
    CweCounts c;
    CHECK(c.tpr() == doctest::Approx(0.0));
    CHECK(c.fpr() == doctest::Approx(0.0));
    c.tp = 3;
    c.fn = 1;
    c.fp = 1;
    c.tn = 9;
    CHECK(c.tpr() == doctest::Approx(0.75));
    CHECK(c.fpr() == doctest::Approx(0.1));
}

TEST_CASE("load_corpus reads every labeled case") {
    auto cases = load_corpus(source_dir() / "corpus");
    CHECK(cases.size() >= 160);

    std::map<std::string, std::pair<int, int>> per;  // cwe -> (bad, good)
    for (const auto& c : cases) {
        REQUIRE((c.variant == "bad" || c.variant == "good"));
        if (c.variant == "bad") {
            per[c.cwe_dir].first += 1;
            CHECK_MESSAGE(!c.sites.empty(), (c.cwe_dir + "/" + c.id));
            for (const auto& s : c.sites) {
                CHECK(s.should_flag);
                CHECK(!s.function.empty());
            }
        } else {
            per[c.cwe_dir].second += 1;
            CHECK_MESSAGE(c.sites.empty(), (c.cwe_dir + "/" + c.id));
        }
        CHECK(fs::exists(c.dir / "manifest.json"));
    }
    REQUIRE(per.size() == 4);
    for (const auto& [cwe, bg] : per) {
        CHECK_MESSAGE(bg.first >= 20, cwe);
        CHECK_MESSAGE(bg.second >= 20, cwe);
    }
}

TEST_CASE("load_corpus rejects a missing directory") {
    CHECK_THROWS(load_corpus(source_dir() / "no-such-corpus"));
}

TEST_CASE("full corpus run matches the committed results") {
    fs::path out = fresh_out("full");
    BenchResult r = run_corpus(source_dir() / "corpus", out, 8);

    for (const auto& e : r.errors) CAPTURE(e);
    CHECK(r.errors.empty());

    // Every committed label is confirmed by concrete execution, and every
    // oracle-provable defect is flagged by the pipeline at the same site.
    for (const auto& c : r.cases) {
        CAPTURE(c.cwe_dir + "/" + c.id);
        CHECK(c.oracle_agrees);
        CHECK(c.pipeline_covers);
    }

    REQUIRE(r.per_cwe.size() == 4);
    for (const auto& [cwe, counts] : r.per_cwe) {
        CAPTURE(cwe);
        CHECK(counts.fn == 0);
        CHECK(counts.tpr() == doctest::Approx(1.0));
    }
    // The two reference-alias cases are deliberately kept as field-init
    // patterns the chain traversal cannot credit without --resolve-ref-aliases.
    CHECK(r.per_cwe.at("cwe457").fp == 2);
    CHECK(r.per_cwe.at("cwe457").fpr() == doctest::Approx(2.0 / 22.0));
    CHECK(r.per_cwe.at("cwe843").fp == 0);
    CHECK(r.per_cwe.at("cwe195").fp == 0);
    CHECK(r.per_cwe.at("cwe194").fp == 0);

    // Byte-stable serialized results, pinned by the committed golden files.
    CHECK(bench_results_json(r) == slurp_file(source_dir() / "tests/golden/bench-results.json"));
    CHECK(bench_results_text(r) == slurp_file(source_dir() / "tests/golden/bench-results.txt"));

    // The runner mirrors both serializations into the output directory.
    CHECK(slurp_file(out / "bench-results.json") == bench_results_json(r));
    CHECK(slurp_file(out / "bench-results.txt") == bench_results_text(r));
    CHECK(fs::exists(out / "timing.json"));

    // Timing identities over the aggregated measurements.
    CHECK(r.timing.ta_x == doctest::Approx(r.timing.sa_x + r.timing.wpa_x));
    if (r.timing.queries > 0)
        CHECK(r.timing.wp_avg_t_ns == r.timing.wpa_ns / r.timing.queries);

    fs::remove_all(out);
}

TEST_CASE("results table lists one row per weakness class") {
    auto cases = load_corpus(source_dir() / "corpus");
    (void)cases;
    std::string txt = slurp_file(source_dir() / "tests/golden/bench-results.txt");
    CHECK(txt.find("CWE") != std::string::npos);
    CHECK(txt.find("TPR") != std::string::npos);
    CHECK(txt.find("FPR") != std::string::npos);
    for (const char* cwe : {"cwe194", "cwe195", "cwe457", "cwe843"})
        CHECK(txt.find(cwe) != std::string::npos);
    CHECK(txt.find("164 cases") != std::string::npos);
}
