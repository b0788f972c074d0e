#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "moa/bench.hpp"
#include "moa/driver.hpp"
#include "moa/frontend.hpp"
#include "moa/oracle.hpp"

namespace py = pybind11;

namespace {

using SourceList = std::vector<std::pair<std::string, std::string>>;

py::dict loc_to_dict(const moa::SourceLoc& loc) {
    py::dict d;
    d["file"] = loc.file;
    d["line"] = loc.line;
    d["col"] = loc.col;
    return d;
}

// Parse + check a single unit, returning {"ok": bool, "unit": name, "diagnostics": [str]}.
py::dict py_check_unit(const std::string& source, const std::string& path) {
    moa::DiagList diags;
    auto tu = moa::parse_unit(source, path, diags);
    py::dict out;
    out["ok"] = diags.empty();
    out["unit"] = tu ? tu->name : std::string();
    py::list rendered;
    for (const auto& d : diags) rendered.append(d.str());
    out["diagnostics"] = rendered;
    return out;
}

// Parse + check a whole program given as [(path, source), ...].
py::dict py_check_program(const SourceList& sources) {
    moa::DiagList diags;
    auto prog = moa::analyze_sources(sources, diags);
    py::dict out;
    out["ok"] = diags.empty();
    py::list rendered;
    for (const auto& d : diags) rendered.append(d.str());
    out["diagnostics"] = rendered;
    py::list classes;
    for (const auto& c : prog.classes) classes.append(c->name.name);
    out["classes"] = classes;
    py::list functions;
    for (const auto& f : prog.functions) functions.append(f->name.name);
    out["functions"] = functions;
    return out;
}

moa::ProgramAST analyze_or_throw(const SourceList& sources) {
    moa::DiagList diags;
    auto prog = moa::analyze_sources(sources, diags);
    if (!diags.empty()) throw std::invalid_argument(diags.front().str());
    return prog;
}

moa::Tape tape_from_py(const py::sequence& inputs) {
    moa::Tape tape;
    for (const auto& item : inputs) {
        moa::TapeValue v;
        if (py::isinstance<py::bool_>(item)) {
            v.tag = moa::VarTag::Bool;
            v.b = item.cast<bool>();
        } else if (py::isinstance<py::int_>(item)) {
            v.tag = moa::VarTag::Int;
            v.i = item.cast<int64_t>();
        } else if (py::isinstance<py::str>(item) && item.cast<std::string>() == "ref") {
            v.tag = moa::VarTag::Ref;
        } else {
            throw std::invalid_argument("inputs must be ints, bools, or the string 'ref'");
        }
        tape.push_back(v);
    }
    return tape;
}

py::object tape_value_to_py(const moa::TapeValue& v) {
    switch (v.tag) {
        case moa::VarTag::Int: return py::int_(v.i);
        case moa::VarTag::Bool: return py::bool_(v.b);
        case moa::VarTag::Ref: return py::str("ref");
    }
    return py::none();
}

py::dict oracle_result_to_dict(const moa::OracleResult& r) {
    py::dict out;
    py::list defects;
    for (const auto& d : r.defects) {
        py::dict e;
        e["cwe"] = d.cwe;
        e["decl"] = d.decl;
        e["loc"] = loc_to_dict(d.loc);
        e["function"] = d.function;
        py::list stack;
        for (const auto& f : d.call_stack) stack.append(f);
        e["call_stack"] = stack;
        py::list witness;
        for (const auto& v : d.witness) witness.append(tape_value_to_py(v));
        e["witness"] = witness;
        defects.append(e);
    }
    out["defects"] = defects;
    out["completed"] = r.completed;
    out["steps"] = r.steps;
    out["inputs_consumed"] = r.inputs_consumed;
    py::dict vcalls;
    for (const auto& [site, targets] : r.vcall_targets) {
        py::list t;
        for (const auto& name : targets) t.append(name);
        vcalls[py::str(site)] = t;
    }
    out["vcall_targets"] = vcalls;
    return out;
}

// Concretely execute `entry` on one input tape.
py::dict py_execute(const SourceList& sources, const std::string& entry,
                    const py::sequence& inputs) {
    auto prog = analyze_or_throw(sources);
    return oracle_result_to_dict(moa::oracle_run(prog, entry, tape_from_py(inputs)));
}

// Concretely execute `entry` over the whole bounded input domain.
py::dict py_execute_all_inputs(const SourceList& sources, const std::string& entry) {
    auto prog = analyze_or_throw(sources);
    return oracle_result_to_dict(moa::oracle_enumerate(prog, entry));
}

py::dict timing_to_dict(const moa::Timing& t) {
    py::dict d;
    d["n_t_ns"] = t.n_t_ns;
    d["sa_ns"] = t.sa_ns;
    d["wpa_ns"] = t.wpa_ns;
    d["queries"] = t.queries;
    d["sa_x"] = t.sa_x;
    d["wpa_x"] = t.wpa_x;
    d["ta_x"] = t.ta_x;
    d["wp_avg_t_ns"] = t.wp_avg_t_ns;
    return d;
}

py::dict summary_to_dict(const moa::RunSummary& s) {
    py::dict out;
    out["candidates"] = s.candidates;
    out["confirmed"] = s.confirmed;
    out["false_positives"] = s.false_positives;
    py::list units;
    for (const auto& u : s.units) {
        py::dict e;
        e["unit"] = u.unit;
        e["status"] = u.status;
        py::list ids;
        for (const auto& id : u.report_ids) ids.append(id);
        e["report_ids"] = ids;
        py::list errs;
        for (const auto& err : u.errors) errs.append(err);
        e["errors"] = errs;
        units.append(e);
    }
    out["units"] = units;
    py::list errors;
    for (const auto& err : s.errors) errors.append(err);
    out["errors"] = errors;
    out["timing"] = timing_to_dict(s.timing);
    out["exit_code"] = s.exit_code;
    return out;
}

// Manifest-driven pipeline entry point, mirroring the CLI's run/stage1/stage2.
py::dict py_run(const std::string& manifest, const std::string& stage, int jobs,
                const py::object& path_budget, const py::object& loop_bound,
                const py::object& chain_cap, const py::object& resolve_ref_aliases,
                const py::object& checkers, const py::object& out_dir, bool exit_zero) {
    moa::DriverConfig cfg;
    cfg.manifest_path = manifest;
    cfg.jobs = jobs;
    if (!path_budget.is_none()) cfg.path_budget = path_budget.cast<int64_t>();
    if (!loop_bound.is_none()) cfg.loop_bound = loop_bound.cast<int>();
    if (!chain_cap.is_none()) cfg.chain_cap = chain_cap.cast<int>();
    if (!resolve_ref_aliases.is_none())
        cfg.resolve_ref_aliases = resolve_ref_aliases.cast<bool>();
    if (!checkers.is_none()) cfg.checkers = checkers.cast<std::vector<std::string>>();
    if (!out_dir.is_none()) cfg.out_dir = out_dir.cast<std::string>();
    cfg.exit_zero = exit_zero;

    moa::RunSummary summary;
    if (stage == "all") {
        summary = moa::run_all(cfg);
    } else if (stage == "stage1") {
        summary = moa::run_stage1(cfg);
    } else if (stage == "stage2") {
        summary = moa::run_stage2(cfg);
    } else {
        throw std::invalid_argument("stage must be 'all', 'stage1', or 'stage2'");
    }
    return summary_to_dict(summary);
}

// Labeled-corpus benchmark over bad/good cases.
py::dict py_run_corpus(const std::string& corpus_dir, const std::string& out_dir, int jobs) {
    auto r = moa::run_corpus(corpus_dir, out_dir, jobs);
    py::dict out;
    py::dict per_cwe;
    for (const auto& [cwe, c] : r.per_cwe) {
        py::dict e;
        e["tp"] = c.tp;
        e["fp"] = c.fp;
        e["tn"] = c.tn;
        e["fn"] = c.fn;
        e["tpr"] = c.tpr();
        e["fpr"] = c.fpr();
        per_cwe[py::str(cwe)] = e;
    }
    out["per_cwe"] = per_cwe;
    py::list cases;
    for (const auto& c : r.cases) {
        py::dict e;
        e["cwe"] = c.cwe_dir;
        e["id"] = c.id;
        e["variant"] = c.variant;
        e["oracle_agrees"] = c.oracle_agrees;
        e["pipeline_covers"] = c.pipeline_covers;
        py::list notes;
        for (const auto& n : c.notes) notes.append(n);
        e["notes"] = notes;
        cases.append(e);
    }
    out["cases"] = cases;
    py::list errors;
    for (const auto& err : r.errors) errors.append(err);
    out["errors"] = errors;
    out["timing"] = timing_to_dict(r.timing);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Static analyzer for MiniObj programs";
    m.attr("__version__") = "0.1.0";

    m.def("check_unit", &py_check_unit, py::arg("source"), py::arg("path") = "unit.mo",
          "Parse and type-check a single translation unit.");
    m.def("check_program", &py_check_program, py::arg("sources"),
          "Parse and type-check a program given as [(path, source), ...].");
    m.def("run", &py_run, py::arg("manifest"), py::kw_only(), py::arg("stage") = "all",
          py::arg("jobs") = 1, py::arg("path_budget") = py::none(),
          py::arg("loop_bound") = py::none(), py::arg("chain_cap") = py::none(),
          py::arg("resolve_ref_aliases") = py::none(), py::arg("checkers") = py::none(),
          py::arg("out_dir") = py::none(), py::arg("exit_zero") = false,
          "Run the analysis pipeline over a build manifest; stage is 'all', "
          "'stage1', or 'stage2'. Returns the run summary.");
    m.def("execute", &py_execute, py::arg("sources"), py::arg("entry"),
          py::arg("inputs") = py::tuple(),
          "Concretely execute `entry` with the given extern_input() values "
          "(ints, bools, or 'ref'), reporting observed defects.");
    m.def("execute_all_inputs", &py_execute_all_inputs, py::arg("sources"), py::arg("entry"),
          "Concretely execute `entry` over the bounded input domain and union "
          "the observed defects.");
    m.def("run_corpus", &py_run_corpus, py::arg("corpus_dir"), py::arg("out_dir"),
          py::arg("jobs") = 1,
          "Run the pipeline over a labeled corpus and return per-weakness "
          "detection counts plus per-case outcomes.");
}
