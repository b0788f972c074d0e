#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "moa/ast.hpp"
#include "moa/diag.hpp"

namespace moa {

// Parses one unit. `path` names the source for diagnostics and report output;
// the unit name is `path` minus directories and the .mo suffix.
//
// Syntax errors and unit-local semantic errors are reported here. A unit with
// no imports is fully type-checked on success (tu->checked). Units with
// imports defer cross-unit name binding to resolve_program(); their bodies are
// checked there once the imported declarations are visible.
UnitPtr parse_unit(const std::string& source, const std::string& path, DiagList& diags);

// Syntax-only parse: no name binding, no type checking. Useful for tooling
// (pretty-printer round trips) and as the first phase of parse_unit.
UnitPtr parse_unit_syntax(const std::string& source, const std::string& path, DiagList& diags);

// Binds imports between the given units, detects conflicting definitions and
// unresolved imports, and finishes semantic analysis for every unit that still
// needs it. Units are consumed. On errors, diagnostics are appended and the
// returned program may be partially populated; callers must treat any
// diagnostics as failure.
ProgramAST resolve_program(std::vector<UnitPtr> units, DiagList& diags);

// Convenience used throughout the driver and tests: parse every source and
// resolve. `sources` maps path -> content, processed in the given order.
ProgramAST analyze_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                           DiagList& diags);

// Canonical source renderer. parse(pretty_print(parse(s))) is structurally
// identical to parse(s); tests rely on the output being stable.
std::string pretty_print(const TranslationUnit& tu);

// Unit name from a path: strips directories and a trailing ".mo".
std::string unit_name_from_path(const std::string& path);

}  // namespace moa
