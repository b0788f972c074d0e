#include "moa/ir.hpp"

#include <algorithm>

namespace moa {

namespace {

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

const char* binop_name(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "add";
        case BinaryOp::Sub: return "sub";
        case BinaryOp::Mul: return "mul";
        case BinaryOp::Div: return "div";
        case BinaryOp::Eq: return "eq";
        case BinaryOp::Ne: return "ne";
        case BinaryOp::Lt: return "lt";
        case BinaryOp::Le: return "le";
        case BinaryOp::Gt: return "gt";
        case BinaryOp::Ge: return "ge";
    }
    return "?";
}

const char* conv_name(ConvKind k) {
    switch (k) {
        case ConvKind::WidenSigned: return "widen_signed";
        case ConvKind::WidenUnsigned: return "widen_unsigned";
        case ConvKind::SignedToUnsigned: return "signed_to_unsigned";
        case ConvKind::IntTruth: return "int_truth";
        case ConvKind::BoxVar: return "box";
        case ConvKind::Upcast: return "upcast";
    }
    return "?";
}

class FnLowerer {
public:
    FnLowerer(const ProgramAST& prog, const FunctionDecl& fn, std::set<DeclID>& address_taken)
        : prog_(prog), fn_(fn), address_taken_(address_taken) {
        for (const auto& p : fn.params)
            if (p.by_ref) byref_params_.insert(p.name);
    }

    IRFunction run() {
        IRFunction out;
        out.id = fn_.id;
        out.unit = fn_.unit;
        out.owner_class = fn_.owner_class;
        out.is_ctor = fn_.is_ctor;
        out.vslot = fn_.vslot;
        for (const auto& p : fn_.params) out.params.push_back(p.name);
        out.start = fn_.loc;
        out.end = fn_.end_loc;
        if (fn_.body) lower_stmt(*fn_.body);
        out.ref_param_writes = std::move(ref_writes_);
        out.body = std::move(body_);
        return out;
    }

private:
    const ProgramAST& prog_;
    const FunctionDecl& fn_;
    std::set<DeclID>& address_taken_;
    std::set<std::string> byref_params_;
    std::set<std::string> ref_writes_;
    std::vector<IRInstr> body_;
    int next_reg_ = 0;

    IRInstr& emit(IROp op, SourceLoc loc) {
        IRInstr ins;
        ins.op = op;
        ins.loc = std::move(loc);
        body_.push_back(std::move(ins));
        return body_.back();
    }

    int fresh() { return next_reg_++; }

    void lower_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& c : s.body) lower_stmt(*c);
                return;
            case StmtKind::If: {
                IROperand c = lower_expr(*s.cond);
                {
                    IRInstr& br = emit(IROp::Br, s.loc);
                    br.detail = "if";
                    br.args = {c};
                }
                lower_stmt(*s.then_stmt);
                if (s.else_stmt) {
                    emit(IROp::Br, s.else_stmt->loc).detail = "else";
                    lower_stmt(*s.else_stmt);
                }
                emit(IROp::Br, s.loc).detail = "endif";
                return;
            }
            case StmtKind::While: {
                emit(IROp::Br, s.loc).detail = "while";
                IROperand c = lower_expr(*s.cond);
                {
                    IRInstr& br = emit(IROp::Br, s.loc);
                    br.detail = "loop";
                    br.args = {c};
                }
                lower_stmt(*s.then_stmt);
                emit(IROp::Br, s.loc).detail = "endwhile";
                return;
            }
            case StmtKind::Return: {
                IRInstr ret;
                ret.op = IROp::Ret;
                ret.loc = s.loc;
                if (s.value) ret.args = {lower_expr(*s.value)};
                body_.push_back(std::move(ret));
                return;
            }
            case StmtKind::VarDecl: {
                IROperand v = lower_expr(*s.value);
                IRInstr& mv = emit(IROp::Move, s.loc);
                mv.local = s.name;
                mv.args = {v};
                return;
            }
            case StmtKind::Assign: {
                IROperand v = lower_expr(*s.value);
                const Expr& tgt = *s.target;
                if (tgt.kind == ExprKind::LocalRef) {
                    IRInstr& mv = emit(IROp::Move, tgt.loc);
                    mv.local = tgt.name;
                    mv.args = {v};
                    if (byref_params_.count(tgt.name)) ref_writes_.insert(tgt.name);
                } else {
                    IROperand base = tgt.base ? lower_expr(*tgt.base) : IROperand::self();
                    IRInstr& st = emit(IROp::Store, tgt.loc);
                    st.field = tgt.decl;
                    st.args = {v, base};
                }
                return;
            }
            case StmtKind::ExprStmt:
                lower_expr(*s.value);
                return;
        }
    }

    // Lowers call arguments. By-reference field arguments are address
    // bindings, not reads: they lower to a `none` operand plus an alias note
    // instead of a `load`.
    void lower_args(const std::vector<ExprPtr>& args, const std::vector<Param>* params,
                    std::vector<IROperand>& out, std::vector<IRAlias>& aliases) {
        for (size_t i = 0; i < args.size(); ++i) {
            bool by_ref = params && i < params->size() && (*params)[i].by_ref;
            if (by_ref && args[i]->kind == ExprKind::FieldAccess) {
                aliases.push_back(IRAlias{(*params)[i].name, args[i]->decl});
                out.push_back(IROperand::none());
            } else if (by_ref && args[i]->kind == ExprKind::LocalRef) {
                out.push_back(IROperand::loc(args[i]->name));
            } else {
                out.push_back(lower_expr(*args[i]));
            }
        }
    }

    IROperand lower_expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: return IROperand::imm(e.ival);
            case ExprKind::BoolLit: return IROperand::imm(e.bval ? 1 : 0);
            case ExprKind::TagConst: return IROperand::imm(static_cast<int64_t>(e.tag));
            case ExprKind::This: return IROperand::self();
            case ExprKind::LocalRef: return IROperand::loc(e.name);
            case ExprKind::FnConst:
                address_taken_.insert(e.decl);
                return IROperand::fnc(e.decl);
            case ExprKind::FieldAccess: {
                IROperand base = e.base ? lower_expr(*e.base) : IROperand::self();
                int r = fresh();
                IRInstr& ld = emit(IROp::Load, e.loc);
                ld.field = e.decl;
                ld.dst = r;
                ld.args = {base};
                return IROperand::reg(r);
            }
            case ExprKind::Unary: {
                IROperand a = lower_expr(*e.base);
                int r = fresh();
                IRInstr& op = emit(IROp::BinOp, e.loc);
                op.detail = e.un_op == UnaryOp::Not ? "not" : "neg";
                op.dst = r;
                op.args = {a};
                return IROperand::reg(r);
            }
            case ExprKind::Binary: {
                IROperand a = lower_expr(*e.base);
                IROperand b = lower_expr(*e.rhs);
                int r = fresh();
                IRInstr& op = emit(IROp::BinOp, e.loc);
                op.detail = binop_name(e.bin_op);
                op.dst = r;
                op.args = {a, b};
                return IROperand::reg(r);
            }
            case ExprKind::Call: return lower_call(e);
            case ExprKind::New: {
                const ClassDecl* cls = prog_.find_class(e.name);
                const FunctionDecl* ctor = cls ? cls->ctor : nullptr;
                std::vector<IROperand> args;
                std::vector<IRAlias> aliases;
                lower_args(e.args, ctor ? &ctor->params : nullptr, args, aliases);
                int r = fresh();
                IRInstr& call = emit(IROp::Call, e.loc);
                call.new_class = e.name;
                if (ctor) call.callee = ctor->id;
                call.dst = r;
                call.args = std::move(args);
                call.aliases = std::move(aliases);
                return IROperand::reg(r);
            }
            case ExprKind::Downcast: {
                IROperand src = lower_expr(*e.base);
                int r = fresh();
                IRInstr& c = emit(IROp::Cast, e.loc);
                c.detail = "downcast<" + e.type.class_name + ">";
                c.dst = r;
                c.args = {src};
                return IROperand::reg(r);
            }
            case ExprKind::Cast: {
                IROperand src = lower_expr(*e.base);
                int r = fresh();
                IRInstr& c = emit(IROp::Cast, e.loc);
                c.detail = "cast<" + e.type.str() + ">";
                c.dst = r;
                c.args = {src};
                return IROperand::reg(r);
            }
            case ExprKind::ImplicitConv: {
                IROperand src = lower_expr(*e.base);
                int r = fresh();
                IRInstr& c = emit(IROp::Cast, e.loc);
                c.detail = conv_name(e.conv);
                c.dst = r;
                c.args = {src};
                return IROperand::reg(r);
            }
        }
        return IROperand::none();
    }

    IROperand lower_call(const Expr& e) {
        if (e.call_kind == CallKind::Intrinsic) {
            std::vector<IROperand> args;
            std::vector<IRAlias> aliases;
            lower_args(e.args, nullptr, args, aliases);
            int r = fresh();
            IRInstr& call = emit(IROp::Call, e.loc);
            call.callee = e.name;
            call.intrinsic = true;
            call.dst = r;
            call.args = std::move(args);
            return IROperand::reg(r);
        }

        const FunctionDecl* callee = e.decl.empty() ? nullptr : prog_.find_function(e.decl);

        if (e.call_kind == CallKind::Indirect) {
            IROperand target = e.base ? lower_expr(*e.base) : IROperand::none();
            std::vector<IROperand> args{target};
            std::vector<IRAlias> aliases;
            lower_args(e.args, nullptr, args, aliases);
            int r = fresh();
            IRInstr& call = emit(IROp::ICall, e.loc);
            call.dst = r;
            call.args = std::move(args);
            return IROperand::reg(r);
        }

        std::vector<IROperand> args;
        if (e.call_kind == CallKind::Method || e.call_kind == CallKind::Virtual)
            args.push_back(e.base ? lower_expr(*e.base) : IROperand::self());
        std::vector<IRAlias> aliases;
        {
            // Receiver occupies args[0]; the alias scan works on source args.
            std::vector<IROperand> rest;
            lower_args(e.args, callee ? &callee->params : nullptr, rest, aliases);
            for (auto& a : rest) args.push_back(std::move(a));
        }

        int r = fresh();
        if (e.call_kind == CallKind::Virtual) {
            IRInstr& call = emit(IROp::VCall, e.loc);
            call.vslot = e.vslot;
            call.static_class = e.static_class;
            call.dst = r;
            call.args = std::move(args);
            call.aliases = std::move(aliases);
        } else {
            IRInstr& call = emit(IROp::Call, e.loc);
            call.callee = e.decl;
            call.dst = r;
            call.args = std::move(args);
            call.aliases = std::move(aliases);
        }
        return IROperand::reg(r);
    }
};

std::vector<DeclID> vtable_of(const ProgramAST& prog, const std::string& cls) {
    std::vector<const ClassDecl*> chain;  // root first
    for (const ClassDecl* c = prog.find_class(cls); c;
         c = c->base.empty() ? nullptr : prog.find_class(c->base))
        chain.insert(chain.begin(), c);
    std::vector<DeclID> vt;
    for (const ClassDecl* c : chain)
        for (const auto& m : c->methods)
            if (m->is_virtual && m->vslot >= 0) {
                if (m->vslot >= static_cast<int>(vt.size())) vt.resize(m->vslot + 1);
                vt[m->vslot] = m->id;
            }
    return vt;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

using json = nlohmann::json;

json loc_to_json(const SourceLoc& l) {
    return json{{"file", l.file}, {"line", l.line}, {"col", l.col}};
}

SourceLoc loc_from_json(const json& j) {
    SourceLoc l;
    l.file = j.at("file").get<std::string>();
    l.line = j.at("line").get<int>();
    l.col = j.at("col").get<int>();
    return l;
}

json operand_to_json(const IROperand& o) {
    switch (o.kind) {
        case IROperandKind::None: return json{{"k", "none"}};
        case IROperandKind::VReg: return json{{"k", "vreg"}, {"v", o.vreg}};
        case IROperandKind::IConst: return json{{"k", "iconst"}, {"v", o.iconst}};
        case IROperandKind::FnConst: return json{{"k", "fn"}, {"v", o.fn}};
        case IROperandKind::Local: return json{{"k", "local"}, {"v", o.local}};
        case IROperandKind::This: return json{{"k", "this"}};
    }
    return json{{"k", "none"}};
}

IROperand operand_from_json(const json& j) {
    const std::string k = j.at("k").get<std::string>();
    if (k == "vreg") return IROperand::reg(j.at("v").get<int>());
    if (k == "iconst") return IROperand::imm(j.at("v").get<int64_t>());
    if (k == "fn") return IROperand::fnc(j.at("v").get<std::string>());
    if (k == "local") return IROperand::loc(j.at("v").get<std::string>());
    if (k == "this") return IROperand::self();
    return IROperand::none();
}

const char* op_name(IROp op) {
    switch (op) {
        case IROp::Load: return "load";
        case IROp::Store: return "store";
        case IROp::Move: return "move";
        case IROp::Cast: return "cast";
        case IROp::BinOp: return "binop";
        case IROp::Call: return "call";
        case IROp::VCall: return "vcall";
        case IROp::ICall: return "icall";
        case IROp::Br: return "br";
        case IROp::Ret: return "ret";
    }
    return "?";
}

IROp op_from_name(const std::string& n) {
    if (n == "load") return IROp::Load;
    if (n == "store") return IROp::Store;
    if (n == "move") return IROp::Move;
    if (n == "cast") return IROp::Cast;
    if (n == "binop") return IROp::BinOp;
    if (n == "call") return IROp::Call;
    if (n == "vcall") return IROp::VCall;
    if (n == "icall") return IROp::ICall;
    if (n == "ret") return IROp::Ret;
    return IROp::Br;
}

json instr_to_json(const IRInstr& i) {
    json j;
    j["op"] = op_name(i.op);
    j["loc"] = loc_to_json(i.loc);
    if (i.dst != -1) j["dst"] = i.dst;
    if (!i.field.empty()) j["field"] = i.field;
    if (!i.callee.empty()) j["callee"] = i.callee;
    if (!i.new_class.empty()) j["new_class"] = i.new_class;
    if (i.intrinsic) j["intrinsic"] = true;
    if (i.vslot != -1) j["vslot"] = i.vslot;
    if (!i.static_class.empty()) j["static_class"] = i.static_class;
    if (!i.local.empty()) j["local"] = i.local;
    if (!i.detail.empty()) j["detail"] = i.detail;
    if (!i.args.empty()) {
        json a = json::array();
        for (const auto& o : i.args) a.push_back(operand_to_json(o));
        j["args"] = std::move(a);
    }
    if (!i.aliases.empty()) {
        json a = json::array();
        for (const auto& al : i.aliases) a.push_back(json{{"param", al.param}, {"field", al.field}});
        j["aliases"] = std::move(a);
    }
    return j;
}

IRInstr instr_from_json(const json& j) {
    IRInstr i;
    i.op = op_from_name(j.at("op").get<std::string>());
    i.loc = loc_from_json(j.at("loc"));
    if (j.contains("dst")) i.dst = j["dst"].get<int>();
    if (j.contains("field")) i.field = j["field"].get<std::string>();
    if (j.contains("callee")) i.callee = j["callee"].get<std::string>();
    if (j.contains("new_class")) i.new_class = j["new_class"].get<std::string>();
    if (j.contains("intrinsic")) i.intrinsic = j["intrinsic"].get<bool>();
    if (j.contains("vslot")) i.vslot = j["vslot"].get<int>();
    if (j.contains("static_class")) i.static_class = j["static_class"].get<std::string>();
    if (j.contains("local")) i.local = j["local"].get<std::string>();
    if (j.contains("detail")) i.detail = j["detail"].get<std::string>();
    if (j.contains("args"))
        for (const auto& o : j["args"]) i.args.push_back(operand_from_json(o));
    if (j.contains("aliases"))
        for (const auto& a : j["aliases"])
            i.aliases.push_back(
                IRAlias{a.at("param").get<std::string>(), a.at("field").get<std::string>()});
    return i;
}

json function_to_json(const IRFunction& f) {
    json j;
    j["id"] = f.id;
    j["unit"] = f.unit;
    if (!f.owner_class.empty()) j["owner_class"] = f.owner_class;
    if (f.is_ctor) j["is_ctor"] = true;
    if (f.vslot != -1) j["vslot"] = f.vslot;
    j["params"] = f.params;
    if (!f.ref_param_writes.empty()) j["ref_param_writes"] = f.ref_param_writes;
    j["start"] = loc_to_json(f.start);
    j["end"] = loc_to_json(f.end);
    json body = json::array();
    for (const auto& i : f.body) body.push_back(instr_to_json(i));
    j["body"] = std::move(body);
    return j;
}

IRFunction function_from_json(const json& j) {
    IRFunction f;
    f.id = j.at("id").get<std::string>();
    f.unit = j.at("unit").get<std::string>();
    if (j.contains("owner_class")) f.owner_class = j["owner_class"].get<std::string>();
    if (j.contains("is_ctor")) f.is_ctor = j["is_ctor"].get<bool>();
    if (j.contains("vslot")) f.vslot = j["vslot"].get<int>();
    f.params = j.at("params").get<std::vector<std::string>>();
    if (j.contains("ref_param_writes"))
        f.ref_param_writes = j["ref_param_writes"].get<std::set<std::string>>();
    f.start = loc_from_json(j.at("start"));
    f.end = loc_from_json(j.at("end"));
    for (const auto& i : j.at("body")) f.body.push_back(instr_from_json(i));
    return f;
}

json class_to_json(const IRClass& c) {
    json j;
    j["name"] = c.name;
    if (!c.base.empty()) j["base"] = c.base;
    j["unit"] = c.unit;
    j["has_ctor"] = c.has_ctor;
    j["fields"] = c.fields;
    j["vtable"] = c.vtable;
    return j;
}

IRClass class_from_json(const json& j) {
    IRClass c;
    c.name = j.at("name").get<std::string>();
    if (j.contains("base")) c.base = j["base"].get<std::string>();
    c.unit = j.at("unit").get<std::string>();
    c.has_ctor = j.at("has_ctor").get<bool>();
    c.fields = j.at("fields").get<std::vector<DeclID>>();
    c.vtable = j.at("vtable").get<std::vector<DeclID>>();
    return c;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

UnitIR lower_unit(const ProgramAST& prog, const std::string& unit_name) {
    UnitIR out;
    out.unit = unit_name;

    const TranslationUnit* tu = nullptr;
    for (const auto& u : prog.units)
        if (u->name == unit_name) tu = u.get();

    std::set<DeclID> address_taken;
    for (const auto& [id, fn] : prog.functions) {
        if (fn->unit != unit_name) continue;
        out.functions.push_back(FnLowerer(prog, *fn, address_taken).run());
    }
    out.address_taken.assign(address_taken.begin(), address_taken.end());

    if (tu) {
        for (const auto& cls : tu->classes) {
            IRClass c;
            c.name = cls->name;
            c.base = cls->base;
            c.unit = unit_name;
            c.has_ctor = cls->ctor != nullptr;
            for (const auto& f : cls->fields) c.fields.push_back(f.id);
            c.vtable = vtable_of(prog, cls->name);
            out.classes.push_back(std::move(c));
        }
        std::sort(out.classes.begin(), out.classes.end(),
                  [](const IRClass& a, const IRClass& b) { return a.name < b.name; });

        // Record the vtable layout of every class this unit can name: its
        // own, its direct imports', and their base closures.
        std::set<std::string> visible;
        for (const auto& cls : tu->classes) visible.insert(cls->name);
        for (const auto& imp : tu->imports)
            for (const auto& u : prog.units)
                if (u->name == imp.name)
                    for (const auto& cls : u->classes) visible.insert(cls->name);
        std::set<std::string> closed = visible;
        for (const auto& name : visible)
            for (const ClassDecl* c = prog.find_class(name); c && !c->base.empty();
                 c = prog.find_class(c->base))
                closed.insert(c->base);
        for (const auto& name : closed) {
            auto vt = vtable_of(prog, name);
            if (!vt.empty()) out.observed_vtables[name] = std::move(vt);
        }
    }
    return out;
}

std::string unit_ir_to_json(const UnitIR& u) {
    json j;
    j["format"] = "moa-mir-1";
    j["unit"] = u.unit;
    json fns = json::array();
    for (const auto& f : u.functions) fns.push_back(function_to_json(f));
    j["functions"] = std::move(fns);
    json classes = json::array();
    for (const auto& c : u.classes) classes.push_back(class_to_json(c));
    j["classes"] = std::move(classes);
    j["observed_vtables"] = u.observed_vtables;
    j["address_taken"] = u.address_taken;
    return dump_canonical(j);
}

UnitIR unit_ir_from_json(const std::string& text) {
    json j = json::parse(text);
    UnitIR u;
    u.unit = j.at("unit").get<std::string>();
    for (const auto& f : j.at("functions")) u.functions.push_back(function_from_json(f));
    for (const auto& c : j.at("classes")) u.classes.push_back(class_from_json(c));
    if (j.contains("observed_vtables"))
        u.observed_vtables =
            j["observed_vtables"].get<std::map<std::string, std::vector<DeclID>>>();
    u.address_taken = j.at("address_taken").get<std::vector<DeclID>>();
    return u;
}

std::string program_ir_to_json(const ProgramIR& p) {
    json j;
    j["format"] = "moa-mir-program-1";
    json fns = json::array();
    for (const auto& f : p.functions) fns.push_back(function_to_json(f));
    j["functions"] = std::move(fns);
    json classes = json::array();
    for (const auto& c : p.classes) classes.push_back(class_to_json(c));
    j["classes"] = std::move(classes);
    j["address_taken"] = p.address_taken;
    return dump_canonical(j);
}

ProgramIR program_ir_from_json(const std::string& text) {
    json j = json::parse(text);
    ProgramIR p;
    for (const auto& f : j.at("functions")) p.functions.push_back(function_from_json(f));
    for (const auto& c : j.at("classes")) p.classes.push_back(class_from_json(c));
    p.address_taken = j.at("address_taken").get<std::vector<DeclID>>();
    return p;
}

const IRFunction* ProgramIR::find_function(const DeclID& id) const {
    for (const auto& f : functions)
        if (f.id == id) return &f;
    return nullptr;
}

const IRClass* ProgramIR::find_class(const std::string& name) const {
    for (const auto& c : classes)
        if (c.name == name) return &c;
    return nullptr;
}

bool ProgramIR::is_subclass_of(const std::string& derived, const std::string& base) const {
    for (const IRClass* c = find_class(derived); c;
         c = c->base.empty() ? nullptr : find_class(c->base)) {
        if (c->name == base) return true;
    }
    return false;
}

std::vector<std::string> ProgramIR::subclass_cone(const std::string& c) const {
    std::vector<std::string> out;
    for (const auto& cls : classes)
        if (is_subclass_of(cls.name, c)) out.push_back(cls.name);
    return out;  // classes are already name-sorted
}

LinkResult link_units(const std::vector<UnitIR>& units, const std::vector<DeclID>& entries) {
    LinkResult res;
    std::map<DeclID, IRFunction> fns;
    std::map<std::string, IRClass> classes;
    std::map<std::string, std::pair<std::vector<DeclID>, std::string>> vtables;
    std::set<DeclID> address_taken;

    for (const auto& u : units) {
        for (const auto& f : u.functions) {
            if (!fns.emplace(f.id, f).second)
                res.errors.push_back("duplicate symbol '" + f.id + "'");
        }
        for (const auto& c : u.classes) {
            if (!classes.emplace(c.name, c).second)
                res.errors.push_back("duplicate class '" + c.name + "'");
        }
        for (const auto& [name, vt] : u.observed_vtables) {
            auto it = vtables.find(name);
            if (it == vtables.end()) {
                vtables.emplace(name, std::make_pair(vt, u.unit));
            } else if (it->second.first != vt) {
                res.errors.push_back("vtable shape mismatch for class '" + name + "' between '" +
                                     it->second.second + "' and '" + u.unit + "'");
            }
        }
        address_taken.insert(u.address_taken.begin(), u.address_taken.end());
    }

    for (const auto& e : entries)
        if (fns.find(e) == fns.end())
            res.errors.push_back("missing entry point '" + e + "'");

    if (!res.errors.empty()) return res;

    ProgramIR p;
    for (auto& [id, f] : fns) p.functions.push_back(std::move(f));
    for (auto& [name, c] : classes) p.classes.push_back(std::move(c));
    p.address_taken.assign(address_taken.begin(), address_taken.end());
    res.program = std::move(p);
    return res;
}

}  // namespace moa
