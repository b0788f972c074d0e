#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "moa/ast.hpp"
#include "moa/diag.hpp"

namespace moa {

// A linear, typed intermediate form per function. Field traffic is explicit:
// every field read lowers to exactly one `load` and every field write to
// exactly one `store`, which is what the whole-program passes traverse.
enum class IROp { Load, Store, Move, Cast, BinOp, Call, VCall, ICall, Br, Ret };

enum class IROperandKind { None, VReg, IConst, FnConst, Local, This };

struct IROperand {
    IROperandKind kind = IROperandKind::None;
    int vreg = -1;      // VReg
    int64_t iconst = 0; // IConst
    DeclID fn;          // FnConst
    std::string local;  // Local

    static IROperand none() { return {}; }
    static IROperand reg(int r) {
        IROperand o;
        o.kind = IROperandKind::VReg;
        o.vreg = r;
        return o;
    }
    static IROperand imm(int64_t v) {
        IROperand o;
        o.kind = IROperandKind::IConst;
        o.iconst = v;
        return o;
    }
    static IROperand fnc(DeclID id) {
        IROperand o;
        o.kind = IROperandKind::FnConst;
        o.fn = std::move(id);
        return o;
    }
    static IROperand loc(std::string name) {
        IROperand o;
        o.kind = IROperandKind::Local;
        o.local = std::move(name);
        return o;
    }
    static IROperand self() {
        IROperand o;
        o.kind = IROperandKind::This;
        return o;
    }

    bool operator==(const IROperand& o) const {
        return kind == o.kind && vreg == o.vreg && iconst == o.iconst && fn == o.fn &&
               local == o.local;
    }
};

// A call-site note that argument expression `this.field`/`obj.field` was bound
// to by-reference parameter `param` of the callee.
struct IRAlias {
    std::string param;
    DeclID field;
    bool operator==(const IRAlias& o) const { return param == o.param && field == o.field; }
};

struct IRInstr {
    IROp op = IROp::Br;
    SourceLoc loc;
    int dst = -1;             // defined vreg, -1 when none
    DeclID field;             // Load/Store target field
    DeclID callee;            // Call: direct target (empty for pure construction)
    std::string new_class;    // Call: class constructed at this site
    bool intrinsic = false;   // Call: runtime-provided, no call-graph edge
    int vslot = -1;           // VCall: vtable slot
    std::string static_class; // VCall: static receiver class
    std::string local;        // Move: target local
    std::string detail;       // BinOp operator, Cast kind, Br marker
    std::vector<IROperand> args;
    std::vector<IRAlias> aliases;  // Call: by-ref field bindings
};

struct IRFunction {
    DeclID id;
    std::string unit;
    std::string owner_class;  // empty for free functions
    bool is_ctor = false;
    int vslot = -1;  // slot if virtual, -1 otherwise
    std::vector<std::string> params;
    std::set<std::string> ref_param_writes;  // by-ref params stored through
    SourceLoc start, end;                    // source extent of the body
    std::vector<IRInstr> body;
};

struct IRClass {
    std::string name;
    std::string base;  // empty for roots
    std::string unit;
    bool has_ctor = false;
    std::vector<DeclID> fields;
    std::vector<DeclID> vtable;  // slot -> most-derived method at declaration
};

struct UnitIR {
    std::string unit;
    std::vector<IRFunction> functions;  // sorted by id
    std::vector<IRClass> classes;       // declared here, sorted by name
    // Vtable layouts this unit compiled against, for link-time validation.
    std::map<std::string, std::vector<DeclID>> observed_vtables;
    std::vector<DeclID> address_taken;  // functions whose address is taken, sorted
};

struct ProgramIR {
    std::vector<IRFunction> functions;  // sorted by id
    std::vector<IRClass> classes;       // sorted by name
    std::vector<DeclID> address_taken;  // sorted, deduplicated

    const IRFunction* find_function(const DeclID& id) const;
    const IRClass* find_class(const std::string& name) const;
    // True when `derived` equals `base` or transitively extends it.
    bool is_subclass_of(const std::string& derived, const std::string& base) const;
    // All classes at or below `c`, sorted by name.
    std::vector<std::string> subclass_cone(const std::string& c) const;
};

// Lowers one resolved translation unit.
UnitIR lower_unit(const ProgramAST& prog, const std::string& unit_name);

// Canonical serialization: keys sorted, two-space indent, trailing newline.
// Identical inputs produce byte-identical text.
std::string unit_ir_to_json(const UnitIR& u);
UnitIR unit_ir_from_json(const std::string& text);
std::string program_ir_to_json(const ProgramIR& p);
ProgramIR program_ir_from_json(const std::string& text);

struct LinkResult {
    std::optional<ProgramIR> program;
    std::vector<std::string> errors;
};

// Combines unit IRs into one program, validating that symbols are unique,
// vtable layouts agree, and every requested entry point exists.
LinkResult link_units(const std::vector<UnitIR>& units, const std::vector<DeclID>& entries);

}  // namespace moa
