#include "moa/oracle.hpp"

#include <algorithm>
#include <deque>
#include <memory>

namespace moa {

namespace {

constexpr int64_t kStepLimit = 200000;

struct RtObject;
using ObjRef = std::shared_ptr<RtObject>;

struct SextMark {
    SourceLoc loc;
    DeclID function;
};

struct RtValue {
    enum class Kind { Unit, Int, Bool, Var, Tag, Obj, Fn, Buf };
    Kind kind = Kind::Unit;
    int64_t i = 0;
    TypeKind int_type = TypeKind::I32;
    bool b = false;
    VarTag vtag = VarTag::Int;  // Var payload selector; payload lives in i/b/obj
    std::optional<VarTag> tag;  // Tag value
    ObjRef obj;
    DeclID fn;
    int64_t buf_size = 0;
    std::optional<SextMark> sext;

    static RtValue int_of(int64_t v, TypeKind k) {
        RtValue r;
        r.kind = Kind::Int;
        r.i = v;
        r.int_type = k;
        return r;
    }
    static RtValue bool_of(bool v) {
        RtValue r;
        r.kind = Kind::Bool;
        r.b = v;
        return r;
    }
};

struct RtObject {
    std::string cls;
    std::map<DeclID, RtValue> fields;
    std::set<DeclID> inited;
};

// Wrap a raw 64-bit result into the representable range of `k`.
int64_t wrap_to(TypeKind k, int64_t v) {
    switch (k) {
        case TypeKind::I8: return static_cast<int8_t>(static_cast<uint64_t>(v));
        case TypeKind::I32: return static_cast<int32_t>(static_cast<uint64_t>(v));
        case TypeKind::U8: return static_cast<uint8_t>(static_cast<uint64_t>(v));
        case TypeKind::U32: return static_cast<uint32_t>(static_cast<uint64_t>(v));
        default: return v;
    }
}

RtValue zero_value(const Type& t) {
    RtValue v;
    switch (t.kind) {
        case TypeKind::I8:
        case TypeKind::I32:
        case TypeKind::U8:
        case TypeKind::U32: return RtValue::int_of(0, t.kind);
        case TypeKind::Bool: return RtValue::bool_of(false);
        case TypeKind::Var:
            v.kind = RtValue::Kind::Var;
            v.vtag = VarTag::Int;
            v.i = 0;
            return v;
        case TypeKind::Tag: v.kind = RtValue::Kind::Tag; return v;
        case TypeKind::ClassPtr: v.kind = RtValue::Kind::Obj; return v;
        case TypeKind::FnRef: v.kind = RtValue::Kind::Fn; return v;
        case TypeKind::Buf: v.kind = RtValue::Kind::Buf; return v;
        case TypeKind::Void: return v;
    }
    return v;
}

// An assignable slot: a local cell or an object field.
struct LValue {
    RtValue* slot = nullptr;
    RtObject* owner = nullptr;  // set for fields
    DeclID field;
};

class Interp {
public:
    Interp(const ProgramAST& prog, const Tape& tape) : prog_(prog), tape_(tape) {}

    OracleResult run(const DeclID& entry) {
        OracleResult res;
        const FunctionDecl* fn = prog_.find_function(entry);
        if (fn && fn->body) call_function(*fn, nullptr, {});
        res.defects = std::move(defects_);
        res.completed = !aborted_;
        res.steps = steps_;
        res.inputs_consumed = inputs_consumed_;
        res.vcall_targets = std::move(vcall_targets_);
        return res;
    }

private:
    const ProgramAST& prog_;
    const Tape& tape_;
    int64_t steps_ = 0;
    bool aborted_ = false;
    int inputs_consumed_ = 0;
    std::vector<OracleDefect> defects_;
    std::set<std::string> defect_keys_;
    std::vector<DeclID> stack_;
    std::map<std::string, std::set<DeclID>> vcall_targets_;

    struct Frame {
        std::vector<std::map<std::string, LValue>> scopes;
        std::deque<RtValue> storage;  // stable addresses for owned locals
        ObjRef self;
    };
    std::vector<Frame> frames_;

    bool tick() {
        if (aborted_) return false;
        if (++steps_ > kStepLimit) {
            aborted_ = true;
            return false;
        }
        return true;
    }

    void defect(int cwe, const DeclID& decl, const SourceLoc& loc) {
        std::string key = std::to_string(cwe) + "|" + decl + "|" + loc.str();
        if (!defect_keys_.insert(key).second) return;
        OracleDefect d;
        d.cwe = cwe;
        d.decl = decl;
        d.loc = loc;
        d.function = stack_.empty() ? DeclID{} : stack_.back();
        d.call_stack = stack_;
        d.witness = tape_;
        defects_.push_back(std::move(d));
    }

    // ---- frames and locals -------------------------------------------------

    LValue* find_local(const std::string& name) {
        Frame& f = frames_.back();
        for (auto it = f.scopes.rbegin(); it != f.scopes.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return &found->second;
        }
        return nullptr;
    }

    void declare_local(const std::string& name, RtValue v) {
        Frame& f = frames_.back();
        f.storage.push_back(std::move(v));
        f.scopes.back()[name] = LValue{&f.storage.back(), nullptr, {}};
    }

    void declare_alias(const std::string& name, LValue lv) {
        frames_.back().scopes.back()[name] = lv;
    }

    RtValue& field_slot(RtObject& obj, const DeclID& member) {
        auto it = obj.fields.find(member);
        if (it == obj.fields.end()) {
            auto fit = prog_.fields.find(member);
            Type t = fit != prog_.fields.end() ? fit->second->type : Type{};
            it = obj.fields.emplace(member, zero_value(t)).first;
        }
        return it->second;
    }

    void write_lvalue(const LValue& lv, RtValue v) {
        *lv.slot = std::move(v);
        if (lv.owner) lv.owner->inited.insert(lv.field);
    }

    RtValue read_lvalue(const LValue& lv, const SourceLoc& loc) {
        if (lv.owner && lv.owner->inited.count(lv.field) == 0)
            defect(457, lv.field, loc);
        return *lv.slot;
    }

    // ---- function invocation -----------------------------------------------

    RtValue call_function(const FunctionDecl& fn, const ObjRef* self,
                          const std::vector<RtValue>& args,
                          const std::vector<std::optional<LValue>>& ref_args = {}) {
        if (frames_.size() >= 512) {  // runaway recursion in the subject program
            aborted_ = true;
            return zero_value(fn.ret);
        }
        Frame frame;
        frame.scopes.emplace_back();
        if (self) frame.self = *self;
        frames_.push_back(std::move(frame));
        stack_.push_back(fn.id);

        for (size_t i = 0; i < fn.params.size(); ++i) {
            if (fn.params[i].by_ref && i < ref_args.size() && ref_args[i]) {
                declare_alias(fn.params[i].name, *ref_args[i]);
            } else {
                declare_local(fn.params[i].name,
                              i < args.size() ? args[i] : zero_value(fn.params[i].type));
            }
        }

        std::optional<RtValue> ret;
        if (fn.body) ret = exec_stmt(*fn.body);

        stack_.pop_back();
        frames_.pop_back();
        return ret ? std::move(*ret) : zero_value(fn.ret);
    }

    // Runs constructors base-first on a fresh object of dynamic class `cls`.
    void construct(const ObjRef& obj, const std::string& cls,
                   const std::vector<RtValue>& args,
                   const std::vector<std::optional<LValue>>& ref_args) {
        std::vector<const ClassDecl*> chain;
        for (const ClassDecl* c = prog_.find_class(cls); c;
             c = c->base.empty() ? nullptr : prog_.find_class(c->base))
            chain.insert(chain.begin(), c);
        for (size_t i = 0; i < chain.size(); ++i) {
            if (!chain[i]->ctor) continue;
            bool last = i + 1 == chain.size();
            if (last)
                call_function(*chain[i]->ctor, &obj, args, ref_args);
            else
                call_function(*chain[i]->ctor, &obj, {});
        }
    }

    // ---- statements ----------------------------------------------------------

    std::optional<RtValue> exec_stmt(const Stmt& s) {
        if (!tick()) return RtValue{};
        switch (s.kind) {
            case StmtKind::Block: {
                frames_.back().scopes.emplace_back();
                std::optional<RtValue> ret;
                for (const auto& child : s.body) {
                    ret = exec_stmt(*child);
                    if (ret || aborted_) break;
                }
                frames_.back().scopes.pop_back();
                return ret;
            }
            case StmtKind::If: {
                RtValue c = eval(*s.cond);
                if (c.b)
                    return exec_stmt(*s.then_stmt);
                if (s.else_stmt) return exec_stmt(*s.else_stmt);
                return std::nullopt;
            }
            case StmtKind::While: {
                while (!aborted_) {
                    RtValue c = eval(*s.cond);
                    if (!c.b) break;
                    if (auto ret = exec_stmt(*s.then_stmt)) return ret;
                }
                return std::nullopt;
            }
            case StmtKind::Return:
                if (s.value) return eval(*s.value);
                return RtValue{};
            case StmtKind::VarDecl:
                declare_local(s.name, eval(*s.value));
                return std::nullopt;
            case StmtKind::Assign: {
                RtValue v = eval(*s.value);
                if (auto lv = lvalue_of(*s.target)) write_lvalue(*lv, std::move(v));
                return std::nullopt;
            }
            case StmtKind::ExprStmt:
                eval(*s.value);
                return std::nullopt;
        }
        return std::nullopt;
    }

    // ---- lvalues ---------------------------------------------------------------

    std::optional<LValue> lvalue_of(const Expr& e) {
        if (e.kind == ExprKind::LocalRef) {
            if (LValue* lv = find_local(e.name)) return *lv;
            return std::nullopt;
        }
        if (e.kind == ExprKind::FieldAccess) {
            ObjRef obj = e.base ? eval(*e.base).obj : frames_.back().self;
            if (!obj) return std::nullopt;
            RtValue& slot = field_slot(*obj, e.decl);
            return LValue{&slot, obj.get(), e.decl};
        }
        return std::nullopt;
    }

    // ---- expressions -------------------------------------------------------------

    RtValue eval(const Expr& e) {
        if (!tick()) return RtValue{};
        switch (e.kind) {
            case ExprKind::IntLit: return RtValue::int_of(e.ival, e.type.kind);
            case ExprKind::BoolLit: return RtValue::bool_of(e.bval);
            case ExprKind::This: {
                RtValue v;
                v.kind = RtValue::Kind::Obj;
                v.obj = frames_.back().self;
                return v;
            }
            case ExprKind::LocalRef: {
                if (LValue* lv = find_local(e.name)) return read_lvalue(*lv, e.loc);
                return zero_value(e.type);
            }
            case ExprKind::FnConst: {
                RtValue v;
                v.kind = RtValue::Kind::Fn;
                v.fn = e.decl;
                return v;
            }
            case ExprKind::TagConst: {
                RtValue v;
                v.kind = RtValue::Kind::Tag;
                v.tag = e.tag;
                return v;
            }
            case ExprKind::FieldAccess: {
                ObjRef obj = e.base ? eval(*e.base).obj : frames_.back().self;
                if (!obj) return zero_value(e.type);
                if (obj->inited.count(e.decl) == 0) defect(457, e.decl, e.loc);
                return field_slot(*obj, e.decl);
            }
            case ExprKind::Unary: {
                RtValue v = eval(*e.base);
                if (e.un_op == UnaryOp::Not) return RtValue::bool_of(!v.b);
                return RtValue::int_of(wrap_to(e.type.kind, -v.i), e.type.kind);
            }
            case ExprKind::Binary: return eval_binary(e);
            case ExprKind::Call: return eval_call(e);
            case ExprKind::New: return eval_new(e);
            case ExprKind::Downcast: {
                RtValue v = eval(*e.base);
                if (v.obj && !prog_.is_subclass_of(v.obj->cls, e.type.class_name))
                    defect(843, "downcast<" + e.type.class_name + ">", e.loc);
                return v;  // proceed with the same object either way
            }
            case ExprKind::Cast: return eval_cast(e);
            case ExprKind::ImplicitConv: return eval_conv(e);
        }
        return RtValue{};
    }

    RtValue eval_binary(const Expr& e) {
        RtValue a = eval(*e.base);
        RtValue b = eval(*e.rhs);
        switch (e.bin_op) {
            case BinaryOp::Add:
                return RtValue::int_of(wrap_to(e.type.kind, a.i + b.i), e.type.kind);
            case BinaryOp::Sub:
                return RtValue::int_of(wrap_to(e.type.kind, a.i - b.i), e.type.kind);
            case BinaryOp::Mul:
                return RtValue::int_of(wrap_to(e.type.kind, a.i * b.i), e.type.kind);
            case BinaryOp::Div:
                if (b.i == 0) return RtValue::int_of(0, e.type.kind);
                return RtValue::int_of(wrap_to(e.type.kind, a.i / b.i), e.type.kind);
            case BinaryOp::Eq: return RtValue::bool_of(values_equal(a, b));
            case BinaryOp::Ne: return RtValue::bool_of(!values_equal(a, b));
            case BinaryOp::Lt: return RtValue::bool_of(a.i < b.i);
            case BinaryOp::Le: return RtValue::bool_of(a.i <= b.i);
            case BinaryOp::Gt: return RtValue::bool_of(a.i > b.i);
            case BinaryOp::Ge: return RtValue::bool_of(a.i >= b.i);
        }
        return RtValue{};
    }

    static bool values_equal(const RtValue& a, const RtValue& b) {
        if (a.kind == RtValue::Kind::Bool) return a.b == b.b;
        if (a.kind == RtValue::Kind::Tag) return a.tag == b.tag;
        if (a.kind == RtValue::Kind::Obj) return a.obj == b.obj;
        return a.i == b.i;
    }

    RtValue eval_cast(const Expr& e) {
        RtValue v = eval(*e.base);
        if (e.type.is_int()) {
            RtValue out = RtValue::int_of(wrap_to(e.type.kind, v.i), e.type.kind);
            return out;  // explicit casts are sanitizers: no provenance carried
        }
        return v;  // function-reference identity
    }

    RtValue eval_conv(const Expr& e) {
        RtValue v = eval(*e.base);
        switch (e.conv) {
            case ConvKind::WidenSigned: {
                RtValue out = RtValue::int_of(v.i, e.type.kind);
                out.sext = v.sext;
                if (v.i < 0 && !out.sext)
                    out.sext = SextMark{e.loc, stack_.empty() ? DeclID{} : stack_.back()};
                return out;
            }
            case ConvKind::WidenUnsigned: return RtValue::int_of(v.i, e.type.kind);
            case ConvKind::SignedToUnsigned: {
                if (v.i < 0) {
                    std::string from = Type{v.int_type, {}, nullptr}.str();
                    defect(195, from + "->" + e.type.str(), e.loc);
                }
                return RtValue::int_of(wrap_to(e.type.kind, v.i), e.type.kind);
            }
            case ConvKind::IntTruth: return RtValue::bool_of(v.i != 0);
            case ConvKind::BoxVar: {
                RtValue out;
                out.kind = RtValue::Kind::Var;
                if (v.kind == RtValue::Kind::Int) {
                    out.vtag = VarTag::Int;
                    out.i = v.i;
                } else if (v.kind == RtValue::Kind::Bool) {
                    out.vtag = VarTag::Bool;
                    out.b = v.b;
                } else {
                    out.vtag = VarTag::Ref;
                    out.obj = v.obj;
                }
                return out;
            }
            case ConvKind::Upcast: return v;
        }
        return v;
    }

    RtValue eval_new(const Expr& e) {
        std::vector<RtValue> args;
        std::vector<std::optional<LValue>> ref_args;
        eval_call_args(e, prog_.find_class(e.name) && prog_.find_class(e.name)->ctor
                              ? &prog_.find_class(e.name)->ctor->params
                              : nullptr,
                       args, ref_args);
        auto obj = std::make_shared<RtObject>();
        obj->cls = e.name;
        construct(obj, e.name, args, ref_args);
        RtValue v;
        v.kind = RtValue::Kind::Obj;
        v.obj = obj;
        return v;
    }

    void eval_call_args(const Expr& e, const std::vector<Param>* params,
                        std::vector<RtValue>& args,
                        std::vector<std::optional<LValue>>& ref_args) {
        args.clear();
        ref_args.assign(e.args.size(), std::nullopt);
        for (size_t i = 0; i < e.args.size(); ++i) {
            if (params && i < params->size() && (*params)[i].by_ref) {
                ref_args[i] = lvalue_of(*e.args[i]);
                args.push_back(RtValue{});
            } else {
                args.push_back(eval(*e.args[i]));
            }
        }
    }

    RtValue eval_call(const Expr& e) {
        if (e.call_kind == CallKind::Intrinsic) return eval_intrinsic(e);

        const FunctionDecl* target = nullptr;
        ObjRef recv;
        if (e.call_kind == CallKind::Method || e.call_kind == CallKind::Virtual) {
            recv = e.base ? eval(*e.base).obj : frames_.back().self;
            if (!recv) {  // no receiver: skip the call entirely
                for (const auto& a : e.args) eval(*a);
                return zero_value(e.type);
            }
            if (e.call_kind == CallKind::Virtual) {
                target = prog_.lookup_method(recv->cls, declid_leaf(e.decl));
                if (target) vcall_targets_[e.loc.str()].insert(target->id);
            } else {
                target = prog_.find_function(e.decl);
            }
        } else if (e.call_kind == CallKind::Indirect) {
            RtValue f = e.base ? eval(*e.base) : RtValue{};
            if (!f.fn.empty()) target = prog_.find_function(f.fn);
        } else {
            target = prog_.find_function(e.decl);
        }

        std::vector<RtValue> args;
        std::vector<std::optional<LValue>> ref_args;
        eval_call_args(e, target ? &target->params : nullptr, args, ref_args);
        if (!target || !target->body) return zero_value(e.type);
        return call_function(*target, recv ? &recv : nullptr, args, ref_args);
    }

    RtValue eval_intrinsic(const Expr& e) {
        if (e.name == "extern_input") {
            size_t idx = static_cast<size_t>(inputs_consumed_++);
            TapeValue tv = idx < tape_.size() ? tape_[idx] : TapeValue{};
            RtValue v;
            v.kind = RtValue::Kind::Var;
            v.vtag = tv.tag;
            v.i = tv.i;
            v.b = tv.b;
            return v;
        }
        std::vector<RtValue> args;
        for (const auto& a : e.args) args.push_back(eval(*a));

        if (e.name == "tag_of") {
            RtValue v;
            v.kind = RtValue::Kind::Tag;
            v.tag = args[0].vtag;
            return v;
        }
        if (e.name == "as_int") {
            if (args[0].vtag != VarTag::Int) {
                defect(843, "as_int", e.loc);
                return RtValue::int_of(0, TypeKind::I32);
            }
            return RtValue::int_of(wrap_to(TypeKind::I32, args[0].i), TypeKind::I32);
        }
        if (e.name == "as_int8") {
            if (args[0].vtag != VarTag::Int) {
                defect(843, "as_int8", e.loc);
                return RtValue::int_of(0, TypeKind::I8);
            }
            return RtValue::int_of(wrap_to(TypeKind::I8, args[0].i), TypeKind::I8);
        }
        if (e.name == "as_bool") {
            if (args[0].vtag != VarTag::Bool) {
                defect(843, "as_bool", e.loc);
                return RtValue::bool_of(false);
            }
            return RtValue::bool_of(args[0].b);
        }
        if (e.name == "alloc") {
            check_size_arg(args[0]);
            RtValue v;
            v.kind = RtValue::Kind::Buf;
            v.buf_size = args[0].i > 0 ? args[0].i : 0;
            return v;
        }
        if (e.name == "read_buf") {
            check_size_arg(args[1]);
            return RtValue::int_of(0, TypeKind::I32);
        }
        return RtValue{};
    }

    void check_size_arg(const RtValue& v) {
        if (v.sext && v.i < 0) defect(194, "i8->i32", v.sext->loc);
    }
};

void sort_defects(std::vector<OracleDefect>& ds) {
    std::sort(ds.begin(), ds.end(), [](const OracleDefect& a, const OracleDefect& b) {
        if (!(a.loc == b.loc)) return a.loc < b.loc;
        if (a.cwe != b.cwe) return a.cwe < b.cwe;
        return a.decl < b.decl;
    });
}

}  // namespace

OracleResult oracle_run(const ProgramAST& prog, const DeclID& entry, const Tape& tape) {
    Interp interp(prog, tape);
    OracleResult res = interp.run(entry);
    sort_defects(res.defects);
    return res;
}

const std::vector<TapeValue>& oracle_tape_domain() {
    static const std::vector<TapeValue> domain = [] {
        std::vector<TapeValue> d;
        std::set<int64_t> ints;
        for (int v = -128; v <= 127; ++v) ints.insert(v);  // full narrow range
        const int64_t spread[] = {INT32_MIN,  INT32_MIN + 1, -65536, -1000,   -129,
                                  128,        255,           256,    1000,    65536,
                                  1000000,    INT32_MAX - 1, INT32_MAX};
        ints.insert(std::begin(spread), std::end(spread));
        for (int64_t v : ints) {
            TapeValue t;
            t.tag = VarTag::Int;
            t.i = v;
            d.push_back(t);
        }
        for (bool b : {false, true}) {
            TapeValue t;
            t.tag = VarTag::Bool;
            t.b = b;
            d.push_back(t);
        }
        TapeValue r;
        r.tag = VarTag::Ref;
        d.push_back(r);
        return d;
    }();
    return domain;
}

OracleResult oracle_enumerate(const ProgramAST& prog, const DeclID& entry) {
    OracleResult probe = oracle_run(prog, entry, {});
    if (probe.inputs_consumed == 0) return probe;

    OracleResult merged;
    merged.inputs_consumed = probe.inputs_consumed;
    std::set<std::string> seen;
    auto absorb = [&](OracleResult&& r) {
        merged.completed = merged.completed && r.completed;
        merged.steps += r.steps;
        for (auto& d : r.defects) {
            std::string key = std::to_string(d.cwe) + "|" + d.decl + "|" + d.loc.str();
            if (seen.insert(key).second) merged.defects.push_back(std::move(d));
        }
        for (auto& [site, targets] : r.vcall_targets)
            merged.vcall_targets[site].insert(targets.begin(), targets.end());
    };

    const auto& domain = oracle_tape_domain();
    if (probe.inputs_consumed == 1) {
        for (const auto& v : domain) absorb(oracle_run(prog, entry, {v}));
    } else {
        for (const auto& a : domain)
            for (const auto& b : domain) absorb(oracle_run(prog, entry, {a, b}));
    }
    sort_defects(merged.defects);
    return merged;
}

}  // namespace moa
