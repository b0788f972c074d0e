#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "moa/frontend.hpp"

// Semantic analysis: name binding, type checking, implicit-conversion
// insertion, vtable slot assignment. Runs per unit; units that import other
// units are checked in resolve_program once the imported declarations exist.

namespace moa {

namespace {

const char* kTagNames[] = {"Int", "Bool", "Ref"};

bool is_reserved_name(const std::string& n) {
    static const std::set<std::string> r = {"Int",   "Bool",     "Ref",          "extern_input",
                                            "tag_of", "as_int",  "as_int8",      "as_bool",
                                            "alloc",  "read_buf", "main_implicit"};
    return r.count(n) > 0;
}

struct Intrinsic {
    std::vector<Type> params;
    Type ret;
    int size_param = -1;  // index of the size-annotated parameter
};

const std::map<std::string, Intrinsic>& intrinsics() {
    static const std::map<std::string, Intrinsic> t = {
        {"extern_input", {{}, Type::var(), -1}},
        {"tag_of", {{Type::var()}, Type::tag(), -1}},
        {"as_int", {{Type::var()}, Type::i32(), -1}},
        {"as_int8", {{Type::var()}, Type::i8(), -1}},
        {"as_bool", {{Type::var()}, Type::boolean(), -1}},
        {"alloc", {{Type::i32()}, Type::buf(), 0}},
        {"read_buf", {{Type::buf(), Type::i32()}, Type::i32(), 1}},
    };
    return t;
}

bool literal_fits(int64_t v, const Type& t) {
    switch (t.kind) {
        case TypeKind::I8: return v >= -128 && v <= 127;
        case TypeKind::U8: return v >= 0 && v <= 255;
        case TypeKind::I32: return v >= INT32_MIN && v <= INT32_MAX;
        case TypeKind::U32: return v >= 0 && v <= UINT32_MAX;
        default: return false;
    }
}

// Scope of declarations a unit may refer to, plus full-program tables for
// hierarchy walks (a visible class may extend a class from a unit the current
// unit does not import; layout questions still need the whole closure).
class Sema {
  public:
    Sema(ProgramAST& prog, DiagList& diags) : prog_(prog), diags_(diags) {
        for (const auto& u : prog.units) note_unit(*u);
    }

    // Visibility: a unit sees its own declarations plus those of units it
    // imports directly. Hierarchy walks (base chains, field owners) always use
    // the full closure.
    void note_unit(const TranslationUnit& tu) {
        auto& vis = visible_of_[tu.name];
        vis.insert(tu.name);
        for (const auto& imp : tu.imports) vis.insert(imp.name);
    }

    void check_unit(TranslationUnit& tu) {
        unit_ = &tu;
        visible_ = visible_of_[tu.name];
        for (auto& cls : tu.classes) check_class_body(*cls);
        for (auto& fn : tu.functions) check_function(*fn);
        tu.checked = true;
    }

    // Class-level structure checks + vtable layout. Must run for every class
    // (bases first) before any body is checked.
    void check_class_structure(ClassDecl& cls) {
        if (structure_done_.count(cls.name)) return;
        structure_done_.insert(cls.name);
        visible_ = visible_of_[cls.unit];

        if (!cls.base.empty()) {
            ClassDecl* base = mutable_class(cls.base);
            if (!base) {
                error(cls.loc, "unknown base class '" + cls.base + "'");
                cls.base.clear();
            } else if (!visible_.count(base->unit)) {
                error(cls.loc,
                      "base class '" + cls.base + "' is not visible here (missing import)");
                cls.base.clear();
            } else if (inherits_cyclically(cls.name)) {
                error(cls.loc, "inheritance cycle involving class '" + cls.name + "'");
                cls.base.clear();
            } else {
                check_class_structure(*base);
                visible_ = visible_of_[cls.unit];  // restore after recursion
            }
        }

        std::set<std::string> member_names;
        for (auto& f : cls.fields) {
            if (is_reserved_name(f.name)) error(f.loc, "redefinition of builtin '" + f.name + "'");
            if (!member_names.insert(f.name).second)
                error(f.loc, "duplicate member '" + f.name + "' in class '" + cls.name + "'");
            if (!cls.base.empty() && !prog_.field_owner(cls.base, f.name).empty())
                error(f.loc, "field '" + f.name + "' shadows a base class field");
            check_type(f.type, f.loc);
        }

        // vtable: base slots first, then new virtual methods in decl order.
        std::vector<DeclID> vtable;
        std::map<std::string, int> slot_of;  // method name -> slot
        if (!cls.base.empty()) {
            const auto& bvt = vtables_[cls.base];
            vtable = bvt;
            for (size_t i = 0; i < bvt.size(); ++i) slot_of[declid_leaf(bvt[i])] = (int)i;
        }

        for (auto& m : cls.methods) {
            if (m->is_ctor) {
                if (m->name != cls.name)
                    error(m->loc, "constructor must be named after its class");
                continue;
            }
            if (is_reserved_name(m->name))
                error(m->loc, "redefinition of builtin '" + m->name + "'");
            if (!member_names.insert(m->name).second)
                error(m->loc, "duplicate member '" + m->name + "' in class '" + cls.name + "'");
            for (auto& p : m->params) check_type(p.type, p.loc);
            check_type(m->ret, m->loc);

            const FunctionDecl* base_m =
                cls.base.empty() ? nullptr : prog_.lookup_method(cls.base, m->name);
            if (base_m) {
                if (!base_m->is_virtual) {
                    error(m->loc, "method '" + m->name + "' hides a non-virtual base method");
                } else if (!signatures_match(*m, *base_m)) {
                    error(m->loc,
                          "override of virtual method '" + m->name + "' changes the signature");
                } else {
                    m->is_virtual = true;  // overriding implies virtual
                    m->vslot = slot_of.count(m->name) ? slot_of[m->name] : base_m->vslot;
                    if (m->vslot >= 0 && m->vslot < (int)vtable.size()) vtable[m->vslot] = m->id;
                    continue;
                }
            }
            if (m->is_virtual) {
                m->vslot = (int)vtable.size();
                slot_of[m->name] = m->vslot;
                vtable.push_back(m->id);
            }
        }

        if (FunctionDecl* ctor = cls.ctor) {
            for (auto& p : ctor->params) check_type(p.type, p.loc);
            // Constructing this class implicitly runs the base chain's
            // zero-argument constructors; require that they exist.
            if (!cls.base.empty()) {
                const ClassDecl* base = prog_.find_class(cls.base);
                if (base && base->ctor && !base->ctor->params.empty())
                    error(ctor->loc, "base class '" + cls.base +
                                         "' needs a zero-argument constructor");
            }
        } else if (!cls.base.empty()) {
            const ClassDecl* base = prog_.find_class(cls.base);
            if (base && base->ctor && !base->ctor->params.empty())
                error(cls.loc,
                      "base class '" + cls.base + "' needs a zero-argument constructor");
        }
        vtables_[cls.name] = std::move(vtable);
    }

    std::map<std::string, std::vector<DeclID>> take_vtables() { return std::move(vtables_); }

  private:
    ProgramAST& prog_;
    DiagList& diags_;
    TranslationUnit* unit_ = nullptr;
    std::set<std::string> visible_;
    std::map<std::string, std::set<std::string>> visible_of_;
    std::set<std::string> structure_done_;
    std::map<std::string, std::vector<DeclID>> vtables_;

    FunctionDecl* current_fn_ = nullptr;
    std::vector<std::map<std::string, const Param*>> param_scopes_;  // reuse Param for locals
    std::vector<std::unique_ptr<Param>> local_storage_;

    void error(const SourceLoc& loc, std::string msg) { diags_.push_back({loc, std::move(msg)}); }

    ClassDecl* mutable_class(const std::string& name) {
        auto it = prog_.classes.find(name);
        return it == prog_.classes.end() ? nullptr : it->second;
    }

    bool inherits_cyclically(const std::string& start) {
        std::set<std::string> seen;
        std::string cur = start;
        while (!cur.empty()) {
            if (!seen.insert(cur).second) return true;
            const ClassDecl* c = prog_.find_class(cur);
            if (!c) return false;
            cur = c->base;
        }
        return false;
    }

    static bool signatures_match(const FunctionDecl& a, const FunctionDecl& b) {
        if (!(a.ret == b.ret) || a.params.size() != b.params.size()) return false;
        for (size_t i = 0; i < a.params.size(); ++i)
            if (!(a.params[i].type == b.params[i].type) ||
                a.params[i].by_ref != b.params[i].by_ref)
                return false;
        return true;
    }

    bool class_visible(const std::string& name) const {
        auto it = prog_.classes.find(name);
        return it != prog_.classes.end() && visible_.count(it->second->unit) > 0;
    }

    void check_type(const Type& t, const SourceLoc& loc) {
        if (t.kind == TypeKind::ClassPtr) {
            if (!prog_.find_class(t.class_name))
                error(loc, "unknown class '" + t.class_name + "'");
            else if (!class_visible(t.class_name))
                error(loc, "class '" + t.class_name + "' is not visible here (missing import)");
        } else if (t.kind == TypeKind::FnRef && t.fn_sig) {
            for (const auto& p : t.fn_sig->params) check_type(p, loc);
            check_type(t.fn_sig->ret, loc);
        }
    }

    // ---- function bodies -------------------------------------------------

    void check_class_body(ClassDecl& cls) {
        for (auto& m : cls.methods) check_function(*m);
    }

    void check_function(FunctionDecl& fn) {
        current_fn_ = &fn;
        param_scopes_.clear();
        param_scopes_.emplace_back();
        for (auto& p : fn.params) {
            if (is_reserved_name(p.name)) error(p.loc, "redefinition of builtin '" + p.name + "'");
            if (!param_scopes_.back().emplace(p.name, &p).second)
                error(p.loc, "duplicate parameter '" + p.name + "'");
        }
        if (fn.body) {
            check_stmt(*fn.body);
            if (fn.ret.kind != TypeKind::Void && !all_paths_return(*fn.body))
                error(fn.loc, "missing return in function '" + fn.id + "'");
        }
        current_fn_ = nullptr;
    }

    static bool all_paths_return(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Return: return true;
            case StmtKind::Block:
                for (const auto& c : s.body)
                    if (all_paths_return(*c)) return true;
                return false;
            case StmtKind::If:
                return s.else_stmt && all_paths_return(*s.then_stmt) &&
                       all_paths_return(*s.else_stmt);
            default: return false;
        }
    }

    const Param* lookup_local(const std::string& name) {
        for (auto it = param_scopes_.rbegin(); it != param_scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        return nullptr;
    }

    void check_stmt(Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block: {
                param_scopes_.emplace_back();
                for (auto& c : s.body) check_stmt(*c);
                param_scopes_.pop_back();
                return;
            }
            case StmtKind::If:
            case StmtKind::While: {
                check_condition(s.cond);
                if (s.then_stmt) check_stmt(*s.then_stmt);
                if (s.else_stmt) check_stmt(*s.else_stmt);
                return;
            }
            case StmtKind::Return: {
                if (!current_fn_) return;
                if (current_fn_->ret.kind == TypeKind::Void) {
                    if (s.value)
                        error(s.loc, "void function '" + current_fn_->id + "' returns a value");
                    return;
                }
                if (!s.value) {
                    error(s.loc, "non-void function '" + current_fn_->id + "' returns nothing");
                    return;
                }
                if (check_expr(*s.value))
                    coerce(s.value, current_fn_->ret, "return value");
                return;
            }
            case StmtKind::VarDecl: {
                if (is_reserved_name(s.name))
                    error(s.loc, "redefinition of builtin '" + s.name + "'");
                check_type(s.decl_type, s.loc);
                if (s.value && check_expr(*s.value)) coerce(s.value, s.decl_type, "initializer");
                if (param_scopes_.back().count(s.name)) {
                    error(s.loc, "duplicate local '" + s.name + "'");
                    return;
                }
                auto slot = std::make_unique<Param>();
                slot->name = s.name;
                slot->type = s.decl_type;
                slot->loc = s.loc;
                param_scopes_.back().emplace(s.name, slot.get());
                local_storage_.push_back(std::move(slot));
                return;
            }
            case StmtKind::Assign: {
                if (!check_expr(*s.target)) return;
                if (!is_assignable(*s.target)) {
                    error(s.target->loc, "expression is not assignable");
                    return;
                }
                if (check_expr(*s.value)) coerce(s.value, s.target->type, "assignment");
                return;
            }
            case StmtKind::ExprStmt:
                if (s.value) check_expr(*s.value);
                return;
        }
    }

    static bool is_assignable(const Expr& e) {
        if (e.kind == ExprKind::FieldAccess) return true;
        if (e.kind == ExprKind::LocalRef) return true;  // local or (possibly by-ref) param
        return false;
    }

    void check_condition(ExprPtr& e) {
        if (!e || !check_expr(*e)) return;
        if (e->type.kind == TypeKind::Bool) return;
        if (e->type.is_int()) {
            wrap_conv(e, ConvKind::IntTruth, Type::boolean());
            return;
        }
        error(e->loc, "condition must be bool or integer, got " + e->type.str());
    }

    // Wraps `e` in an implicit conversion node.
    void wrap_conv(ExprPtr& e, ConvKind k, Type to) {
        auto conv = std::make_unique<Expr>(ExprKind::ImplicitConv, e->loc);
        conv->conv = k;
        conv->type = std::move(to);
        conv->base = std::move(e);
        e = std::move(conv);
    }

    // Implicit conversion of `e` to `to`; diagnostics on failure.
    bool coerce(ExprPtr& e, const Type& to, const char* what) {
        if (!e) return false;
        const Type& from = e->type;
        if (from == to) return true;
        if (e->kind == ExprKind::IntLit && to.is_int()) {
            if (literal_fits(e->ival, to)) {
                e->type = to;
                return true;
            }
            error(e->loc, std::string("integer literal does not fit ") + to.str());
            return false;
        }
        if (from.kind == TypeKind::I8 && to.kind == TypeKind::I32) {
            wrap_conv(e, ConvKind::WidenSigned, to);
            return true;
        }
        if (from.kind == TypeKind::U8 &&
            (to.kind == TypeKind::U32 || to.kind == TypeKind::I32)) {
            wrap_conv(e, ConvKind::WidenUnsigned, to);
            return true;
        }
        if ((from.kind == TypeKind::I8 && to.kind == TypeKind::U8) ||
            (from.kind == TypeKind::I32 && to.kind == TypeKind::U32)) {
            wrap_conv(e, ConvKind::SignedToUnsigned, to);
            return true;
        }
        if (to.kind == TypeKind::Var &&
            (from.is_int() || from.kind == TypeKind::Bool || from.kind == TypeKind::ClassPtr)) {
            wrap_conv(e, ConvKind::BoxVar, to);
            return true;
        }
        if (from.kind == TypeKind::ClassPtr && to.kind == TypeKind::ClassPtr &&
            prog_.is_subclass_of(from.class_name, to.class_name)) {
            wrap_conv(e, ConvKind::Upcast, to);
            return true;
        }
        error(e->loc, std::string("cannot convert ") + from.str() + " to " + to.str() +
                          " in " + what);
        return false;
    }

    // Arithmetic/comparison operand unification. Returns unified type or Void.
    Type unify_ints(ExprPtr& a, ExprPtr& b, const SourceLoc& loc) {
        if (!a->type.is_int() || !b->type.is_int()) {
            error(loc, "operands must be integers");
            return Type::void_();
        }
        // Literals adapt first.
        if (a->kind == ExprKind::IntLit && !(a->type == b->type) &&
            literal_fits(a->ival, b->type))
            a->type = b->type;
        if (b->kind == ExprKind::IntLit && !(b->type == a->type) &&
            literal_fits(b->ival, a->type))
            b->type = a->type;
        if (a->type == b->type) return a->type;
        if (a->type.is_signed_int() != b->type.is_signed_int()) {
            error(loc, "mixed signed/unsigned arithmetic requires an explicit cast");
            return Type::void_();
        }
        // same signedness, different width: widen the narrow side
        const Type& wide = a->type.bit_width() >= b->type.bit_width() ? a->type : b->type;
        ExprPtr& narrow = a->type.bit_width() >= b->type.bit_width() ? b : a;
        wrap_conv(narrow, wide.is_signed_int() ? ConvKind::WidenSigned : ConvKind::WidenUnsigned,
                  wide);
        return wide;
    }

    bool check_args(std::vector<ExprPtr>& args, const std::vector<Param>& params,
                    const std::string& what, const SourceLoc& loc) {
        if (args.size() != params.size()) {
            error(loc, what + " expects " + std::to_string(params.size()) + " argument(s), got " +
                           std::to_string(args.size()));
            return false;
        }
        bool ok = true;
        for (size_t i = 0; i < args.size(); ++i) {
            if (!check_expr(*args[i])) {
                ok = false;
                continue;
            }
            if (params[i].by_ref) {
                if (!is_assignable(*args[i])) {
                    error(args[i]->loc, "argument to reference parameter '" + params[i].name +
                                            "' must be assignable");
                    ok = false;
                } else if (!(args[i]->type == params[i].type)) {
                    error(args[i]->loc, "reference argument type " + args[i]->type.str() +
                                            " does not match " + params[i].type.str());
                    ok = false;
                }
            } else {
                ok &= coerce(args[i], params[i].type, "argument");
            }
        }
        return ok;
    }

    // Returns false if the expression could not be typed at all.
    bool check_expr(Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: e.type = Type::i32(); return true;
            case ExprKind::BoolLit: e.type = Type::boolean(); return true;
            case ExprKind::This:
                if (!current_fn_ || current_fn_->owner_class.empty()) {
                    error(e.loc, "'this' outside of a method");
                    return false;
                }
                e.type = Type::class_ptr(current_fn_->owner_class);
                return true;
            case ExprKind::ImplicitConv: return true;  // already typed
            case ExprKind::TagConst: e.type = Type::tag(); return true;
            case ExprKind::FnConst: return resolve_fnconst(e);
            case ExprKind::LocalRef: return resolve_name(e);
            case ExprKind::FieldAccess: return resolve_field_access(e);
            case ExprKind::Unary: {
                if (!check_expr(*e.base)) return false;
                if (e.un_op == UnaryOp::Not) {
                    if (e.base->type.is_int()) wrap_conv(e.base, ConvKind::IntTruth, Type::boolean());
                    if (e.base->type.kind != TypeKind::Bool) {
                        error(e.loc, "'!' needs a bool or integer operand");
                        return false;
                    }
                    e.type = Type::boolean();
                    return true;
                }
                if (!e.base->type.is_signed_int()) {
                    error(e.loc, "unary '-' needs a signed integer operand");
                    return false;
                }
                e.type = e.base->type;
                return true;
            }
            case ExprKind::Binary: {
                if (!check_expr(*e.base) || !check_expr(*e.rhs)) return false;
                switch (e.bin_op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub:
                    case BinaryOp::Mul:
                    case BinaryOp::Div: {
                        Type t = unify_ints(e.base, e.rhs, e.loc);
                        if (t.kind == TypeKind::Void) return false;
                        e.type = t;
                        return true;
                    }
                    case BinaryOp::Lt:
                    case BinaryOp::Le:
                    case BinaryOp::Gt:
                    case BinaryOp::Ge: {
                        Type t = unify_ints(e.base, e.rhs, e.loc);
                        if (t.kind == TypeKind::Void) return false;
                        e.type = Type::boolean();
                        return true;
                    }
                    case BinaryOp::Eq:
                    case BinaryOp::Ne: {
                        const Type& a = e.base->type;
                        const Type& b = e.rhs->type;
                        if (a.is_int() && b.is_int()) {
                            if (unify_ints(e.base, e.rhs, e.loc).kind == TypeKind::Void)
                                return false;
                        } else if (a.kind == TypeKind::Bool && b.kind == TypeKind::Bool) {
                            // ok
                        } else if (a.kind == TypeKind::Tag && b.kind == TypeKind::Tag) {
                            // ok (tag_of(v) == Int)
                        } else {
                            error(e.loc, "cannot compare " + a.str() + " with " + b.str());
                            return false;
                        }
                        e.type = Type::boolean();
                        return true;
                    }
                }
                return false;
            }
            case ExprKind::New: return check_new(e);
            case ExprKind::Downcast: return check_downcast(e);
            case ExprKind::Cast: return check_cast(e);
            case ExprKind::Call: return check_call(e);
        }
        return false;
    }

    bool resolve_fnconst(Expr& e) {
        auto it = prog_.functions.find(e.name);
        if (it == prog_.functions.end() || !it->second->owner_class.empty()) {
            if (intrinsics().count(e.name))
                error(e.loc, "cannot take a reference to builtin '" + e.name + "'");
            else
                error(e.loc, "unknown function '" + e.name + "'");
            return false;
        }
        const FunctionDecl* fn = it->second;
        if (!visible_.count(fn->unit)) {
            error(e.loc, "function '" + e.name + "' is not visible here (missing import)");
            return false;
        }
        for (const auto& p : fn->params)
            if (p.by_ref) {
                error(e.loc, "cannot take a reference to a function with reference parameters");
                return false;
            }
        auto sig = std::make_shared<FnSig>();
        for (const auto& p : fn->params) sig->params.push_back(p.type);
        sig->ret = fn->ret;
        e.decl = fn->id;
        e.type = Type::fn_ref(std::move(sig));
        return true;
    }

    // A bare identifier: local/param, field of this, or tag constant.
    bool resolve_name(Expr& e) {
        if (const Param* p = lookup_local(e.name)) {
            e.type = p->type;
            e.decl.clear();
            return true;
        }
        if (current_fn_ && !current_fn_->owner_class.empty()) {
            std::string owner = prog_.field_owner(current_fn_->owner_class, e.name);
            if (!owner.empty()) {
                // Rewrite to this.<name>.
                e.kind = ExprKind::FieldAccess;
                return resolve_field_access(e);
            }
        }
        for (int i = 0; i < 3; ++i) {
            if (e.name == kTagNames[i]) {
                e.kind = ExprKind::TagConst;
                e.tag = static_cast<VarTag>(i);
                e.type = Type::tag();
                return true;
            }
        }
        if (prog_.functions.count(e.name) || intrinsics().count(e.name)) {
            error(e.loc, "function name '" + e.name +
                             "' used as a value; take its reference with '&'");
            return false;
        }
        if (current_fn_ && !current_fn_->owner_class.empty() &&
            prog_.lookup_method(current_fn_->owner_class, e.name)) {
            error(e.loc, "method '" + e.name + "' must be called as 'this." + e.name + "(...)'");
            return false;
        }
        error(e.loc, "unknown identifier '" + e.name + "'");
        return false;
    }

    bool resolve_field_access(Expr& e) {
        std::string recv_class;
        if (e.base) {
            if (!check_expr(*e.base)) return false;
            if (e.base->type.kind != TypeKind::ClassPtr) {
                error(e.loc, "member access on non-class value of type " + e.base->type.str());
                return false;
            }
            recv_class = e.base->type.class_name;
        } else {
            if (!current_fn_ || current_fn_->owner_class.empty()) {
                error(e.loc, "unknown identifier '" + e.name + "'");
                return false;
            }
            recv_class = current_fn_->owner_class;
        }
        std::string owner = prog_.field_owner(recv_class, e.name);
        if (owner.empty()) {
            error(e.loc, "class '" + recv_class + "' has no field '" + e.name + "'");
            return false;
        }
        const ClassDecl* oc = prog_.find_class(owner);
        for (const auto& f : oc->fields) {
            if (f.name == e.name) {
                e.decl = f.id;
                e.type = f.type;
                return true;
            }
        }
        return false;
    }

    bool check_new(Expr& e) {
        const ClassDecl* cls = prog_.find_class(e.name);
        if (!cls) {
            error(e.loc, "unknown class '" + e.name + "'");
            return false;
        }
        if (!class_visible(e.name)) {
            error(e.loc, "class '" + e.name + "' is not visible here (missing import)");
            return false;
        }
        if (cls->ctor) {
            if (!check_args(e.args, cls->ctor->params, "constructor of '" + e.name + "'", e.loc))
                return false;
        } else if (!e.args.empty()) {
            error(e.loc, "class '" + e.name + "' has no constructor taking arguments");
            return false;
        } else {
            for (auto& a : e.args) check_expr(*a);
        }
        e.type = Type::class_ptr(e.name);
        return true;
    }

    bool check_downcast(Expr& e) {
        if (!check_expr(*e.base)) return false;
        if (e.base->type.kind != TypeKind::ClassPtr) {
            error(e.loc, "downcast needs a class pointer operand");
            return false;
        }
        const ClassDecl* target = prog_.find_class(e.name);
        if (!target) {
            error(e.loc, "unknown class '" + e.name + "'");
            return false;
        }
        if (!class_visible(e.name)) {
            error(e.loc, "class '" + e.name + "' is not visible here (missing import)");
            return false;
        }
        if (!prog_.is_subclass_of(e.name, e.base->type.class_name)) {
            error(e.loc, "downcast target '" + e.name + "' is unrelated to static type '" +
                             e.base->type.class_name + "'");
            return false;
        }
        e.cast_type = Type::class_ptr(e.name);
        e.type = e.cast_type;
        return true;
    }

    bool check_cast(Expr& e) {
        if (!check_expr(*e.base)) return false;
        check_type(e.cast_type, e.loc);
        const Type& from = e.base->type;
        const Type& to = e.cast_type;
        if (from.is_int() && to.is_int()) {
            e.type = to;
            return true;
        }
        if (from.kind == TypeKind::FnRef && to.kind == TypeKind::FnRef && from == to) {
            e.type = to;
            return true;
        }
        error(e.loc, "invalid cast from " + from.str() + " to " + to.str());
        return false;
    }

    bool check_call(Expr& e) {
        // Method call: receiver in e.base, name in e.name.
        if (e.call_kind == CallKind::Method) {
            if (!check_expr(*e.base)) return false;
            if (e.base->type.kind != TypeKind::ClassPtr) {
                error(e.loc, "method call on non-class value of type " + e.base->type.str());
                return false;
            }
            const std::string recv = e.base->type.class_name;
            const FunctionDecl* m = prog_.lookup_method(recv, e.name);
            if (!m) {
                error(e.loc, "class '" + recv + "' has no method '" + e.name + "'");
                return false;
            }
            if (!check_args(e.args, m->params, "method '" + m->id + "'", e.loc)) return false;
            e.decl = m->id;
            e.static_class = recv;
            if (m->is_virtual) {
                e.call_kind = CallKind::Virtual;
                e.vslot = m->vslot;
            } else {
                e.call_kind = CallKind::Method;
            }
            e.type = m->ret;
            return true;
        }

        // Everything else: callee expression in e.base.
        Expr& callee = *e.base;
        if (callee.kind == ExprKind::LocalRef) {
            // Could be a local fn-ref value, a free function, or an intrinsic.
            if (const Param* p = lookup_local(callee.name)) {
                callee.type = p->type;
                if (p->type.kind != TypeKind::FnRef) {
                    error(e.loc, "'" + callee.name + "' is not callable");
                    return false;
                }
                e.call_kind = CallKind::Indirect;
                return check_indirect(e, *p->type.fn_sig);
            }
            auto ii = intrinsics().find(callee.name);
            if (ii != intrinsics().end()) {
                e.call_kind = CallKind::Intrinsic;
                e.name = callee.name;
                std::vector<Param> params;
                for (const auto& t : ii->second.params) {
                    Param p;
                    p.type = t;
                    params.push_back(std::move(p));
                }
                if (!check_args(e.args, params, "builtin '" + e.name + "'", e.loc)) return false;
                e.type = ii->second.ret;
                e.base.reset();
                return true;
            }
            auto fi = prog_.functions.find(callee.name);
            if (fi != prog_.functions.end() && fi->second->owner_class.empty()) {
                const FunctionDecl* fn = fi->second;
                if (!visible_.count(fn->unit)) {
                    error(e.loc,
                          "function '" + callee.name + "' is not visible here (missing import)");
                    return false;
                }
                e.call_kind = CallKind::Free;
                e.name = callee.name;
                e.decl = fn->id;
                if (!check_args(e.args, fn->params, "function '" + fn->id + "'", e.loc))
                    return false;
                e.type = fn->ret;
                e.base.reset();
                return true;
            }
            // Fall through to field-of-this fn refs.
        }
        if (!check_expr(callee)) return false;
        if (callee.type.kind != TypeKind::FnRef) {
            error(e.loc, "called expression has type " + callee.type.str() + ", not a function");
            return false;
        }
        e.call_kind = CallKind::Indirect;
        return check_indirect(e, *callee.type.fn_sig);
    }

    bool check_indirect(Expr& e, const FnSig& sig) {
        std::vector<Param> params;
        for (const auto& t : sig.params) {
            Param p;
            p.type = t;
            params.push_back(std::move(p));
        }
        if (!check_args(e.args, params, "indirect call", e.loc)) return false;
        e.type = sig.ret;
        return true;
    }
};

void register_unit_decls(ProgramAST& prog, TranslationUnit& tu, DiagList& diags) {
    for (auto& cls : tu.classes) {
        if (is_reserved_name(cls->name)) {
            diags.push_back({cls->loc, "redefinition of builtin '" + cls->name + "'"});
            continue;
        }
        if (prog.classes.count(cls->name) || prog.functions.count(cls->name)) {
            diags.push_back({cls->loc, "conflicting definition of '" + cls->name + "'"});
            continue;
        }
        prog.classes[cls->name] = cls.get();
        for (auto& f : cls->fields) {
            if (!prog.fields.emplace(f.id, &f).second)
                diags.push_back({f.loc, "conflicting definition of '" + f.id + "'"});
        }
        for (auto& m : cls->methods) {
            m->unit = tu.name;
            if (!prog.functions.emplace(m->id, m.get()).second)
                diags.push_back({m->loc, "conflicting definition of '" + m->id + "'"});
        }
    }
    for (auto& fn : tu.functions) {
        fn->unit = tu.name;
        if (is_reserved_name(fn->name)) {
            diags.push_back({fn->loc, "redefinition of builtin '" + fn->name + "'"});
            continue;
        }
        if (prog.functions.count(fn->id) || prog.classes.count(fn->name)) {
            diags.push_back({fn->loc, "conflicting definition of '" + fn->id + "'"});
            continue;
        }
        prog.functions[fn->id] = fn.get();
    }
}

}  // namespace

UnitPtr parse_unit(const std::string& source, const std::string& path, DiagList& diags) {
    size_t before = diags.size();
    UnitPtr tu = parse_unit_syntax(source, path, diags);
    if (diags.size() != before) return tu;  // syntax errors; no sema
    if (!tu->imports.empty()) return tu;    // cross-unit names resolve in resolve_program
    // Self-contained unit: full check now.
    ProgramAST scratch;
    register_unit_decls(scratch, *tu, diags);
    if (diags.size() != before) return tu;
    Sema sema(scratch, diags);
    sema.note_unit(*tu);
    for (auto& cls : tu->classes) sema.check_class_structure(*cls);
    if (diags.size() != before) return tu;
    sema.check_unit(*tu);
    return tu;
}

ProgramAST resolve_program(std::vector<UnitPtr> units, DiagList& diags) {
    ProgramAST prog;
    size_t before = diags.size();

    std::set<std::string> unit_names;
    for (auto& u : units) {
        if (!unit_names.insert(u->name).second)
            diags.push_back({{u->path, 1, 1}, "duplicate unit '" + u->name + "'"});
    }
    for (auto& u : units) register_unit_decls(prog, *u, diags);
    for (auto& u : units)
        for (const auto& imp : u->imports)
            if (!unit_names.count(imp.name))
                diags.push_back({imp.loc, "unresolved import '" + imp.name + "'"});
    prog.units = std::move(units);
    if (diags.size() != before) return prog;

    Sema sema(prog, diags);
    for (auto& u : prog.units)
        for (auto& cls : u->classes) sema.check_class_structure(*cls);
    if (diags.size() != before) return prog;
    for (auto& u : prog.units) {
        // Units checked by parse_unit stay checked; their decls are already
        // registered and their bodies reference only unit-local names.
        if (!u->checked) sema.check_unit(*u);
    }
    return prog;
}

ProgramAST analyze_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                           DiagList& diags) {
    std::vector<UnitPtr> units;
    for (const auto& [path, content] : sources) {
        size_t before = diags.size();
        auto tu = parse_unit_syntax(content, path, diags);
        if (diags.size() != before) continue;
        units.push_back(std::move(tu));
    }
    if (!diags.empty()) {
        ProgramAST prog;
        prog.units = std::move(units);
        return prog;
    }
    return resolve_program(std::move(units), diags);
}

}  // namespace moa
