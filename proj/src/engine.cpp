#include "moa/engine.hpp"

#include <algorithm>
#include <cassert>

#include "moa/frontend.hpp"

namespace moa {

// ---------------------------------------------------------------------------
// Integer type ranges and interval arithmetic
// ---------------------------------------------------------------------------

int64_t type_min(TypeKind k) {
    switch (k) {
        case TypeKind::I8: return -128;
        case TypeKind::I32: return INT32_MIN;
        case TypeKind::U8:
        case TypeKind::U32: return 0;
        default: return 0;
    }
}

int64_t type_max(TypeKind k) {
    switch (k) {
        case TypeKind::I8: return 127;
        case TypeKind::I32: return INT32_MAX;
        case TypeKind::U8: return 255;
        case TypeKind::U32: return 4294967295LL;
        default: return 0;
    }
}

namespace {

Interval clamp_or_full(__int128 lo, __int128 hi, TypeKind k) {
    if (lo >= type_min(k) && hi <= type_max(k))
        return {static_cast<int64_t>(lo), static_cast<int64_t>(hi)};
    return Interval::full(k);
}

}  // namespace

Interval interval_binop(BinaryOp op, Interval a, Interval b, TypeKind rt) {
    using I128 = __int128;
    switch (op) {
        case BinaryOp::Add:
            return clamp_or_full(I128(a.lo) + b.lo, I128(a.hi) + b.hi, rt);
        case BinaryOp::Sub:
            return clamp_or_full(I128(a.lo) - b.hi, I128(a.hi) - b.lo, rt);
        case BinaryOp::Mul: {
            I128 c[4] = {I128(a.lo) * b.lo, I128(a.lo) * b.hi, I128(a.hi) * b.lo,
                         I128(a.hi) * b.hi};
            return clamp_or_full(*std::min_element(c, c + 4), *std::max_element(c, c + 4), rt);
        }
        case BinaryOp::Div: {
            if (b.lo <= 0 && 0 <= b.hi) return Interval::full(rt);
            I128 c[4] = {I128(a.lo) / b.lo, I128(a.lo) / b.hi, I128(a.hi) / b.lo,
                         I128(a.hi) / b.hi};
            return clamp_or_full(*std::min_element(c, c + 4), *std::max_element(c, c + 4), rt);
        }
        default: return Interval::full(rt);
    }
}

// ---------------------------------------------------------------------------
// Abstract value construction
// ---------------------------------------------------------------------------

AbstractValue AbstractValue::top_of(const Type& t, const ProgramAST& prog) {
    AbstractValue v;
    switch (t.kind) {
        case TypeKind::I8:
        case TypeKind::I32:
        case TypeKind::U8:
        case TypeKind::U32:
            v.kind = AVKind::Int;
            v.int_type = t.kind;
            v.iv = Interval::full(t.kind);
            break;
        case TypeKind::Bool:
            v.kind = AVKind::Bool;
            v.bv = Tri::Unknown;
            break;
        case TypeKind::Var:
            v.kind = AVKind::Var;
            v.tags = kTagAll;
            v.tainted = false;
            break;
        case TypeKind::Tag:
            v.kind = AVKind::Tag;
            break;
        case TypeKind::ClassPtr: {
            v.kind = AVKind::Class;
            for (const auto& c : prog.subclass_cone(t.class_name)) v.classes.insert(c);
            if (v.classes.empty()) v.classes.insert(t.class_name);
            break;
        }
        case TypeKind::FnRef:
            v.kind = AVKind::Fn;
            break;
        case TypeKind::Buf:
            v.kind = AVKind::Buf;
            break;
        case TypeKind::Void:
            v.kind = AVKind::Unknown;
            break;
    }
    return v;
}

AbstractValue AbstractValue::int_const(int64_t x, TypeKind k) {
    AbstractValue v;
    v.kind = AVKind::Int;
    v.int_type = k;
    v.iv = Interval::constant(x);
    return v;
}

AbstractValue AbstractValue::bool_const(bool b) {
    AbstractValue v;
    v.kind = AVKind::Bool;
    v.bv = b ? Tri::True : Tri::False;
    return v;
}

// ---------------------------------------------------------------------------
// Summary population and merging
// ---------------------------------------------------------------------------

void record_event(FunctionSummary& summary, EventKind kind, const DeclID& member, SourceLoc loc) {
    if (kind == EventKind::Def) {
        summary.def_set.emplace(member, std::move(loc));  // first definition wins
    } else {
        if (summary.def_set.find(member) == summary.def_set.end())
            summary.use_without_def_set.insert({member, std::move(loc)});
    }
}

void merge_summary(FunctionSummary& into, const FunctionSummary& path) {
    for (const auto& [member, loc] : path.def_set) {
        auto it = into.def_set.find(member);
        if (it == into.def_set.end())
            into.def_set.emplace(member, loc);
        else if (loc < it->second)
            it->second = loc;  // earliest source location across paths
    }
    into.use_without_def_set.insert(path.use_without_def_set.begin(),
                                    path.use_without_def_set.end());
}

// ---------------------------------------------------------------------------
// Path exploration
// ---------------------------------------------------------------------------

namespace {

Tri truth_of(const AbstractValue& v) {
    if (v.kind == AVKind::Bool) return v.bv;
    return Tri::Unknown;
}

// Locals live in a scope stack; inlined calls swap in a fresh stack.
using Scope = std::map<std::string, AbstractValue>;

struct PathState {
    std::vector<Scope> scopes;
    std::map<DeclID, AbstractValue> members;
    FunctionSummary sum;  // per-path accumulator
    int64_t steps = 0;
};

struct Flow {
    PathState st;
    bool returned = false;
    AbstractValue ret;
};

struct EvalRes {
    PathState st;
    AbstractValue val;
};

class Explorer {
public:
    Explorer(const FunctionDecl& fn, const ProgramAST& prog, const EngineConfig& cfg,
             const EventSink& sink)
        : fn_(fn), prog_(prog), cfg_(cfg), sink_(sink), fork_budget_(cfg.path_budget) {}

    FunctionSummary run() {
        FunctionSummary merged;
        merged.function = fn_.id;

        PathState init;
        init.sum.function = fn_.id;
        init.scopes.push_back(bind_params(fn_));
        if (!fn_.owner_class.empty()) {
            AbstractValue self;
            self.kind = AVKind::Class;
            for (const auto& c : prog_.subclass_cone(fn_.owner_class)) self.classes.insert(c);
            if (self.classes.empty()) self.classes.insert(fn_.owner_class);
            init.scopes.front()["this"] = self;
        }

        std::vector<Flow> flows;
        // A constructor's body runs after its base chain; replay that chain so
        // members the bases define are not reported as unread-before-def here.
        if (fn_.is_ctor) {
            std::vector<Flow> seeds{Flow{std::move(init), false, {}}};
            const ClassDecl* cls = prog_.find_class(fn_.owner_class);
            if (cls && !cls->base.empty()) {
                std::vector<Flow> next;
                for (auto& f : seeds) {
                    auto after =
                        run_ctor_chain(cls->base, fn_.owner_class, std::move(f.st), 1);
                    for (auto& st : after) next.push_back(Flow{std::move(st), false, {}});
                }
                seeds = std::move(next);
            }
            for (auto& f : seeds) {
                auto outs = exec_stmt(*fn_.body, std::move(f.st), 0);
                for (auto& o : outs) flows.push_back(std::move(o));
            }
        } else {
            flows = exec_stmt(*fn_.body, std::move(init), 0);
        }

        merged.paths_explored = static_cast<int64_t>(flows.size());
        for (const auto& f : flows) merge_summary(merged, f.st.sum);
        merged.truncated = truncated_;
        return merged;
    }

private:
    const FunctionDecl& fn_;
    const ProgramAST& prog_;
    const EngineConfig& cfg_;
    const EventSink& sink_;
    int64_t fork_budget_;
    bool truncated_ = false;

    // ---- helpers --------------------------------------------------------

    Scope bind_params(const FunctionDecl& f) {
        Scope s;
        for (const auto& p : f.params) s[p.name] = AbstractValue::top_of(p.type, prog_);
        return s;
    }

    bool may_fork() {
        if (fork_budget_ > 0) {
            --fork_budget_;
            return true;
        }
        truncated_ = true;
        return false;
    }

    bool out_of_steps(PathState& st) {
        if (++st.steps > cfg_.step_budget) {
            truncated_ = true;
            return true;
        }
        return false;
    }

    void emit(const PathEvent& ev) {
        if (sink_) sink_(ev);
    }

    AbstractValue* find_local(PathState& st, const std::string& name) {
        for (auto it = st.scopes.rbegin(); it != st.scopes.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    void set_local(PathState& st, const std::string& name, AbstractValue v) {
        if (AbstractValue* slot = find_local(st, name)) {
            *slot = std::move(v);
        } else {
            st.scopes.back()[name] = std::move(v);
        }
        invalidate_tag_origins(st, name);
    }

    // After a local is (re)bound, tag values derived from it no longer
    // describe it.
    void invalidate_tag_origins(PathState& st, const std::string& name) {
        for (auto& scope : st.scopes)
            for (auto& [_, v] : scope)
                if (v.kind == AVKind::Tag && v.tag_origin == name) v.tag_origin.clear();
    }

    void member_use(PathState& st, const DeclID& member, const SourceLoc& loc, int depth) {
        // Uses are attributed to the function that textually contains them;
        // an inlined callee's reads surface when that callee is explored on
        // its own, so only depth-0 reads land in this summary.
        if (depth == 0) record_event(st.sum, EventKind::Use, member, loc);
    }

    void member_def(PathState& st, const DeclID& member, const SourceLoc& loc) {
        record_event(st.sum, EventKind::Def, member, loc);
    }

    // ---- statements ------------------------------------------------------

    std::vector<Flow> exec_stmt(const Stmt& s, PathState st, int depth) {
        if (out_of_steps(st)) return one_returned(std::move(st));
        switch (s.kind) {
            case StmtKind::Block: return exec_block(s, std::move(st), depth);
            case StmtKind::If: return exec_if(s, std::move(st), depth);
            case StmtKind::While: return exec_while(s, std::move(st), depth);
            case StmtKind::Return: {
                std::vector<Flow> out;
                if (s.value) {
                    for (auto& r : eval(*s.value, std::move(st), depth))
                        out.push_back(Flow{std::move(r.st), true, std::move(r.val)});
                } else {
                    out.push_back(Flow{std::move(st), true, {}});
                }
                return out;
            }
            case StmtKind::VarDecl: {
                std::vector<Flow> out;
                for (auto& r : eval(*s.value, std::move(st), depth)) {
                    r.st.scopes.back()[s.name] = std::move(r.val);
                    invalidate_tag_origins(r.st, s.name);
                    out.push_back(Flow{std::move(r.st), false, {}});
                }
                return out;
            }
            case StmtKind::Assign: return exec_assign(s, std::move(st), depth);
            case StmtKind::ExprStmt: {
                std::vector<Flow> out;
                for (auto& r : eval(*s.value, std::move(st), depth))
                    out.push_back(Flow{std::move(r.st), false, {}});
                return out;
            }
        }
        return one_returned(std::move(st));
    }

    static std::vector<Flow> one_returned(PathState st) {
        std::vector<Flow> out;
        out.push_back(Flow{std::move(st), true, {}});
        return out;
    }

    std::vector<Flow> exec_block(const Stmt& s, PathState st, int depth) {
        st.scopes.emplace_back();
        std::vector<Flow> live{Flow{std::move(st), false, {}}};
        std::vector<Flow> done;
        for (const auto& child : s.body) {
            std::vector<Flow> next;
            for (auto& f : live) {
                for (auto& o : exec_stmt(*child, std::move(f.st), depth)) {
                    if (o.returned) done.push_back(std::move(o));
                    else next.push_back(std::move(o));
                }
            }
            live = std::move(next);
            if (live.empty()) break;
        }
        for (auto& f : live) {
            f.st.scopes.pop_back();
            done.push_back(std::move(f));
        }
        // Returned flows keep their scope stacks; the caller discards them.
        return done;
    }

    std::vector<Flow> exec_assign(const Stmt& s, PathState st, int depth) {
        std::vector<Flow> out;
        for (auto& r : eval(*s.value, std::move(st), depth)) {
            const Expr& tgt = *s.target;
            if (tgt.kind == ExprKind::LocalRef) {
                set_local(r.st, tgt.name, std::move(r.val));
                out.push_back(Flow{std::move(r.st), false, {}});
            } else {
                // Field assignment: evaluate the base object (its reads are
                // real), then record the definition and update member state.
                std::vector<EvalRes> bases;
                if (tgt.base)
                    bases = eval(*tgt.base, std::move(r.st), depth);
                else
                    bases.push_back(EvalRes{std::move(r.st), {}});
                for (auto& b : bases) {
                    member_def(b.st, tgt.decl, tgt.loc);
                    b.st.members[tgt.decl] = r.val;
                    out.push_back(Flow{std::move(b.st), false, {}});
                }
            }
        }
        return out;
    }

    std::vector<Flow> exec_if(const Stmt& s, PathState st, int depth) {
        std::vector<Flow> out;
        for (auto& c : eval(*s.cond, std::move(st), depth)) {
            Tri t = truth_of(c.val);
            if (t == Tri::True) {
                append(out, exec_stmt(*s.then_stmt, std::move(c.st), depth));
            } else if (t == Tri::False) {
                if (s.else_stmt) append(out, exec_stmt(*s.else_stmt, std::move(c.st), depth));
                else out.push_back(Flow{std::move(c.st), false, {}});
            } else {
                bool forked = may_fork();
                if (forked) {
                    PathState else_st = c.st;  // copy before refinement
                    refine(st_cond(s), c.st, true);
                    append(out, exec_stmt(*s.then_stmt, std::move(c.st), depth));
                    refine(st_cond(s), else_st, false);
                    if (s.else_stmt) append(out, exec_stmt(*s.else_stmt, std::move(else_st), depth));
                    else out.push_back(Flow{std::move(else_st), false, {}});
                } else {
                    refine(st_cond(s), c.st, true);
                    append(out, exec_stmt(*s.then_stmt, std::move(c.st), depth));
                }
            }
        }
        return out;
    }

    const Expr& st_cond(const Stmt& s) { return *s.cond; }

    static void append(std::vector<Flow>& to, std::vector<Flow> from) {
        for (auto& f : from) to.push_back(std::move(f));
    }

    std::vector<Flow> exec_while(const Stmt& s, PathState st, int depth) {
        std::vector<Flow> done;
        std::vector<PathState> live;
        live.push_back(std::move(st));

        for (int iter = 0; iter < cfg_.loop_bound && !live.empty(); ++iter) {
            std::vector<PathState> next;
            for (auto& cur : live) {
                for (auto& c : eval(*s.cond, std::move(cur), depth)) {
                    Tri t = truth_of(c.val);
                    if (t == Tri::False) {
                        done.push_back(Flow{std::move(c.st), false, {}});
                        continue;
                    }
                    if (t == Tri::Unknown) {
                        if (may_fork()) {
                            PathState exit_st = c.st;
                            refine(*s.cond, exit_st, false);
                            done.push_back(Flow{std::move(exit_st), false, {}});
                        }
                        refine(*s.cond, c.st, true);
                    }
                    for (auto& b : exec_stmt(*s.then_stmt, std::move(c.st), depth)) {
                        if (b.returned) done.push_back(std::move(b));
                        else next.push_back(std::move(b.st));
                    }
                }
            }
            live = std::move(next);
        }

        // States still looping: widen everything the body writes, make one
        // more pass so events fire over the widened values, then leave.
        if (!live.empty()) {
            std::set<std::string> wlocals;
            std::set<DeclID> wmembers;
            collect_writes(*s.then_stmt, wlocals, wmembers);
            for (auto& cur : live) {
                widen(cur, wlocals, wmembers);
                for (auto& c : eval(*s.cond, std::move(cur), depth)) {
                    Tri t = truth_of(c.val);
                    if (t == Tri::False) {
                        done.push_back(Flow{std::move(c.st), false, {}});
                        continue;
                    }
                    for (auto& b : exec_stmt(*s.then_stmt, std::move(c.st), depth))
                        done.push_back(std::move(b));  // forced exit
                }
            }
        }
        return done;
    }

    void collect_writes(const Stmt& s, std::set<std::string>& locals, std::set<DeclID>& members) {
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& c : s.body) collect_writes(*c, locals, members);
                break;
            case StmtKind::If:
                collect_writes(*s.then_stmt, locals, members);
                if (s.else_stmt) collect_writes(*s.else_stmt, locals, members);
                break;
            case StmtKind::While:
                collect_writes(*s.then_stmt, locals, members);
                break;
            case StmtKind::VarDecl:
                locals.insert(s.name);
                break;
            case StmtKind::Assign:
                if (s.target->kind == ExprKind::LocalRef) locals.insert(s.target->name);
                else members.insert(s.target->decl);
                break;
            default: break;
        }
    }

    void widen(PathState& st, const std::set<std::string>& locals,
               const std::set<DeclID>& members) {
        for (const auto& name : locals) {
            if (AbstractValue* v = find_local(st, name)) {
                bool keep_taint = v->kind == AVKind::Var && v->tainted;
                AbstractValue widened = widen_value(*v);
                if (keep_taint) widened.tainted = true;
                *v = std::move(widened);
                invalidate_tag_origins(st, name);
            }
        }
        for (const auto& m : members) {
            auto it = st.members.find(m);
            const FieldDecl* fd = nullptr;
            auto fit = prog_.fields.find(m);
            if (fit != prog_.fields.end()) fd = fit->second;
            AbstractValue widened =
                fd ? AbstractValue::top_of(fd->type, prog_) : AbstractValue{};
            if (it != st.members.end()) {
                if (it->second.kind == AVKind::Var && it->second.tainted) widened.tainted = true;
                it->second = std::move(widened);
            } else {
                st.members.emplace(m, std::move(widened));
            }
        }
    }

    AbstractValue widen_value(const AbstractValue& v) {
        AbstractValue w = v;
        switch (v.kind) {
            case AVKind::Int:
                w.iv = Interval::full(v.int_type);
                w.sext_origin.reset();
                break;
            case AVKind::Bool: w.bv = Tri::Unknown; break;
            case AVKind::Var: w.tags = kTagAll; break;
            case AVKind::Tag:
                w.tag_value.reset();
                w.tag_origin.clear();
                break;
            case AVKind::Class: break;  // keep the static cone
            case AVKind::Fn: w.fn_target.clear(); break;
            default: break;
        }
        return w;
    }

    // ---- condition refinement (locals only) -------------------------------

    void refine(const Expr& e, PathState& st, bool wanted) {
        switch (e.kind) {
            case ExprKind::Unary:
                if (e.un_op == UnaryOp::Not) refine(*e.base, st, !wanted);
                return;
            case ExprKind::ImplicitConv:
                if (e.conv == ConvKind::IntTruth) refine_int_truth(*e.base, st, wanted);
                return;
            case ExprKind::LocalRef: {
                if (AbstractValue* v = find_local(st, e.name))
                    if (v->kind == AVKind::Bool) v->bv = wanted ? Tri::True : Tri::False;
                return;
            }
            case ExprKind::Binary: refine_binary(e, st, wanted); return;
            default: return;
        }
    }

    void refine_int_truth(const Expr& inner, PathState& st, bool wanted) {
        const Expr* v = unwrap_widen(&inner);
        if (v->kind != ExprKind::LocalRef) return;
        AbstractValue* av = find_local(st, v->name);
        if (!av || av->kind != AVKind::Int) return;
        if (!wanted) {
            if (av->iv.contains(0)) av->iv = Interval::constant(0);
        } else {
            if (av->iv.lo == 0 && av->iv.hi > 0) av->iv.lo = 1;
            else if (av->iv.hi == 0 && av->iv.lo < 0) av->iv.hi = -1;
        }
    }

    static const Expr* unwrap_widen(const Expr* e) {
        while (e->kind == ExprKind::ImplicitConv &&
               (e->conv == ConvKind::WidenSigned || e->conv == ConvKind::WidenUnsigned))
            e = e->base.get();
        return e;
    }

    void refine_binary(const Expr& e, PathState& st, bool wanted) {
        BinaryOp op = e.bin_op;
        // Tag tests: tag_of(v) == TagConst, a tag-typed local == TagConst.
        if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
            if (refine_tag_test(e, st, wanted)) return;
        }
        const Expr* lhs = unwrap_widen(e.base.get());
        const Expr* rhs = unwrap_widen(e.rhs.get());
        const Expr* var = nullptr;
        const Expr* lit = nullptr;
        bool flipped = false;
        if (lhs->kind == ExprKind::LocalRef && rhs->kind == ExprKind::IntLit) {
            var = lhs;
            lit = rhs;
        } else if (rhs->kind == ExprKind::LocalRef && lhs->kind == ExprKind::IntLit) {
            var = rhs;
            lit = lhs;
            flipped = true;
        } else if (lhs->kind == ExprKind::LocalRef && rhs->kind == ExprKind::BoolLit) {
            if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
                bool want_true = (rhs->bval == (op == BinaryOp::Eq)) == wanted;
                if (AbstractValue* v = find_local(st, lhs->name))
                    if (v->kind == AVKind::Bool) v->bv = want_true ? Tri::True : Tri::False;
            }
            return;
        } else {
            return;
        }
        AbstractValue* av = find_local(st, var->name);
        if (!av || av->kind != AVKind::Int) return;
        int64_t c = lit->ival;
        // Normalize to "var OP c".
        if (flipped) {
            switch (op) {
                case BinaryOp::Lt: op = BinaryOp::Gt; break;
                case BinaryOp::Le: op = BinaryOp::Ge; break;
                case BinaryOp::Gt: op = BinaryOp::Lt; break;
                case BinaryOp::Ge: op = BinaryOp::Le; break;
                default: break;
            }
        }
        if (!wanted) {
            switch (op) {
                case BinaryOp::Lt: op = BinaryOp::Ge; break;
                case BinaryOp::Le: op = BinaryOp::Gt; break;
                case BinaryOp::Gt: op = BinaryOp::Le; break;
                case BinaryOp::Ge: op = BinaryOp::Lt; break;
                case BinaryOp::Eq: op = BinaryOp::Ne; break;
                case BinaryOp::Ne: op = BinaryOp::Eq; break;
                default: break;
            }
        }
        Interval& iv = av->iv;
        switch (op) {
            case BinaryOp::Lt: iv.hi = std::min(iv.hi, c - 1); break;
            case BinaryOp::Le: iv.hi = std::min(iv.hi, c); break;
            case BinaryOp::Gt: iv.lo = std::max(iv.lo, c + 1); break;
            case BinaryOp::Ge: iv.lo = std::max(iv.lo, c); break;
            case BinaryOp::Eq:
                if (iv.contains(c)) iv = Interval::constant(c);
                break;
            case BinaryOp::Ne:
                if (iv.lo == c && iv.hi > c) iv.lo = c + 1;
                else if (iv.hi == c && iv.lo < c) iv.hi = c - 1;
                break;
            default: break;
        }
        if (iv.lo > iv.hi) iv = Interval::full(av->int_type);  // contradiction; leave unrefined
    }

    // Returns true when the comparison was a tag test it handled.
    bool refine_tag_test(const Expr& e, PathState& st, bool wanted) {
        const Expr* a = e.base.get();
        const Expr* b = e.rhs.get();
        if (b->kind != ExprKind::TagConst) std::swap(a, b);
        if (b->kind != ExprKind::TagConst) return false;
        bool equal_branch = (e.bin_op == BinaryOp::Eq) == wanted;

        std::string origin;
        if (a->kind == ExprKind::Call && a->call_kind == CallKind::Intrinsic &&
            a->name == "tag_of" && a->args.size() == 1 &&
            a->args[0]->kind == ExprKind::LocalRef) {
            origin = a->args[0]->name;
        } else if (a->kind == ExprKind::LocalRef) {
            if (AbstractValue* t = find_local(st, a->name))
                if (t->kind == AVKind::Tag) origin = t->tag_origin;
        }
        if (origin.empty()) return a->kind == ExprKind::Call || a->kind == ExprKind::LocalRef;
        AbstractValue* v = find_local(st, origin);
        if (!v || v->kind != AVKind::Var) return true;
        TagMask bit = tag_bit(b->tag);
        TagMask next = equal_branch ? static_cast<TagMask>(v->tags & bit)
                                    : static_cast<TagMask>(v->tags & ~bit);
        if (next != 0) v->tags = next;
        return true;
    }

    // ---- expressions -------------------------------------------------------

    std::vector<EvalRes> eval(const Expr& e, PathState st, int depth) {
        if (out_of_steps(st))
            return {EvalRes{std::move(st), AbstractValue::top_of(e.type, prog_)}};
        switch (e.kind) {
            case ExprKind::IntLit:
                return one(std::move(st), AbstractValue::int_const(e.ival, e.type.kind));
            case ExprKind::BoolLit:
                return one(std::move(st), AbstractValue::bool_const(e.bval));
            case ExprKind::This: {
                AbstractValue* v = find_local(st, "this");
                AbstractValue out = v ? *v : AbstractValue::top_of(e.type, prog_);
                return one(std::move(st), std::move(out));
            }
            case ExprKind::LocalRef: {
                AbstractValue* v = find_local(st, e.name);
                AbstractValue out = v ? *v : AbstractValue::top_of(e.type, prog_);
                return one(std::move(st), std::move(out));
            }
            case ExprKind::FnConst: {
                AbstractValue v;
                v.kind = AVKind::Fn;
                v.fn_target = e.decl;
                return one(std::move(st), std::move(v));
            }
            case ExprKind::TagConst: {
                AbstractValue v;
                v.kind = AVKind::Tag;
                v.tag_value = e.tag;
                return one(std::move(st), std::move(v));
            }
            case ExprKind::FieldAccess: return eval_field(e, std::move(st), depth);
            case ExprKind::Unary: return eval_unary(e, std::move(st), depth);
            case ExprKind::Binary: return eval_binary(e, std::move(st), depth);
            case ExprKind::Call: return eval_call(e, std::move(st), depth);
            case ExprKind::New: return eval_new(e, std::move(st), depth);
            case ExprKind::Downcast: return eval_downcast(e, std::move(st), depth);
            case ExprKind::Cast: return eval_cast(e, std::move(st), depth);
            case ExprKind::ImplicitConv: return eval_conv(e, std::move(st), depth);
        }
        return one(std::move(st), AbstractValue::top_of(e.type, prog_));
    }

    static std::vector<EvalRes> one(PathState st, AbstractValue v) {
        std::vector<EvalRes> out;
        out.push_back(EvalRes{std::move(st), std::move(v)});
        return out;
    }

    std::vector<EvalRes> eval_field(const Expr& e, PathState st, int depth) {
        std::vector<EvalRes> bases;
        if (e.base) bases = eval(*e.base, std::move(st), depth);
        else bases.push_back(EvalRes{std::move(st), {}});

        std::vector<EvalRes> out;
        for (auto& b : bases) {
            member_use(b.st, e.decl, e.loc, depth);
            auto it = b.st.members.find(e.decl);
            AbstractValue v =
                it != b.st.members.end() ? it->second : AbstractValue::top_of(e.type, prog_);
            out.push_back(EvalRes{std::move(b.st), std::move(v)});
        }
        return out;
    }

    std::vector<EvalRes> eval_unary(const Expr& e, PathState st, int depth) {
        std::vector<EvalRes> out;
        for (auto& r : eval(*e.base, std::move(st), depth)) {
            AbstractValue v;
            if (e.un_op == UnaryOp::Not) {
                v.kind = AVKind::Bool;
                v.bv = tri_not(truth_of(r.val));
            } else {
                v.kind = AVKind::Int;
                v.int_type = e.type.kind;
                if (r.val.kind == AVKind::Int)
                    v.iv = interval_binop(BinaryOp::Sub, Interval::constant(0), r.val.iv,
                                          e.type.kind);
                else
                    v.iv = Interval::full(e.type.kind);
            }
            out.push_back(EvalRes{std::move(r.st), std::move(v)});
        }
        return out;
    }

    std::vector<EvalRes> eval_binary(const Expr& e, PathState st, int depth) {
        std::vector<EvalRes> out;
        for (auto& l : eval(*e.base, std::move(st), depth)) {
            AbstractValue lv = std::move(l.val);
            for (auto& r : eval(*e.rhs, std::move(l.st), depth)) {
                out.push_back(EvalRes{std::move(r.st), binop_value(e, lv, r.val)});
            }
        }
        return out;
    }

    AbstractValue binop_value(const Expr& e, const AbstractValue& a, const AbstractValue& b) {
        switch (e.bin_op) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div: {
                AbstractValue v;
                v.kind = AVKind::Int;
                v.int_type = e.type.kind;
                if (a.kind == AVKind::Int && b.kind == AVKind::Int)
                    v.iv = interval_binop(e.bin_op, a.iv, b.iv, e.type.kind);
                else
                    v.iv = Interval::full(e.type.kind);
                // Arithmetic results are fresh values: the sign-extension
                // provenance flag does not survive a binop.
                return v;
            }
            default: return compare_value(e.bin_op, a, b);
        }
    }

    AbstractValue compare_value(BinaryOp op, const AbstractValue& a, const AbstractValue& b) {
        Tri t = Tri::Unknown;
        if (a.kind == AVKind::Int && b.kind == AVKind::Int) {
            const Interval &x = a.iv, &y = b.iv;
            switch (op) {
                case BinaryOp::Eq:
                    if (x.singleton() && y.singleton() && x.lo == y.lo) t = Tri::True;
                    else if (x.hi < y.lo || y.hi < x.lo) t = Tri::False;
                    break;
                case BinaryOp::Ne:
                    if (x.singleton() && y.singleton() && x.lo == y.lo) t = Tri::False;
                    else if (x.hi < y.lo || y.hi < x.lo) t = Tri::True;
                    break;
                case BinaryOp::Lt:
                    if (x.hi < y.lo) t = Tri::True;
                    else if (x.lo >= y.hi) t = Tri::False;
                    break;
                case BinaryOp::Le:
                    if (x.hi <= y.lo) t = Tri::True;
                    else if (x.lo > y.hi) t = Tri::False;
                    break;
                case BinaryOp::Gt:
                    if (x.lo > y.hi) t = Tri::True;
                    else if (x.hi <= y.lo) t = Tri::False;
                    break;
                case BinaryOp::Ge:
                    if (x.lo >= y.hi) t = Tri::True;
                    else if (x.hi < y.lo) t = Tri::False;
                    break;
                default: break;
            }
        } else if (a.kind == AVKind::Bool && b.kind == AVKind::Bool) {
            if (a.bv != Tri::Unknown && b.bv != Tri::Unknown) {
                bool eq = a.bv == b.bv;
                t = (eq == (op == BinaryOp::Eq)) ? Tri::True : Tri::False;
            }
        } else if (a.kind == AVKind::Tag && b.kind == AVKind::Tag) {
            if (a.tag_value && b.tag_value) {
                bool eq = *a.tag_value == *b.tag_value;
                t = (eq == (op == BinaryOp::Eq)) ? Tri::True : Tri::False;
            }
        }
        AbstractValue v;
        v.kind = AVKind::Bool;
        v.bv = t;
        return v;
    }

    std::vector<EvalRes> eval_downcast(const Expr& e, PathState st, int depth) {
        std::vector<EvalRes> out;
        const std::string& target = e.type.class_name;
        auto cone = prog_.subclass_cone(target);
        std::set<std::string> cone_set(cone.begin(), cone.end());
        for (auto& r : eval(*e.base, std::move(st), depth)) {
            PathEvent ev;
            ev.kind = PathEventKind::Downcast;
            ev.loc = e.loc;
            ev.in_function = fn_.id;
            ev.target_class = target;
            if (r.val.kind == AVKind::Class)
                ev.possible_classes.assign(r.val.classes.begin(), r.val.classes.end());
            emit(ev);

            AbstractValue v;
            v.kind = AVKind::Class;
            if (r.val.kind == AVKind::Class)
                for (const auto& c : r.val.classes)
                    if (cone_set.count(c)) v.classes.insert(c);
            if (v.classes.empty()) v.classes = cone_set;  // proceed as if it succeeded
            out.push_back(EvalRes{std::move(r.st), std::move(v)});
        }
        return out;
    }

    std::vector<EvalRes> eval_cast(const Expr& e, PathState st, int depth) {
        std::vector<EvalRes> out;
        for (auto& r : eval(*e.base, std::move(st), depth)) {
            AbstractValue v = AbstractValue::top_of(e.type, prog_);
            if (e.type.is_int() && r.val.kind == AVKind::Int) {
                // Explicit casts are intentional: value-preserving when the
                // interval fits, otherwise the full target range; never an
                // event, and the sign-extension flag is dropped.
                if (r.val.iv.lo >= type_min(e.type.kind) && r.val.iv.hi <= type_max(e.type.kind))
                    v.iv = r.val.iv;
                else
                    v.iv = Interval::full(e.type.kind);
            } else if (e.type.kind == TypeKind::FnRef) {
                v = r.val;
            }
            out.push_back(EvalRes{std::move(r.st), std::move(v)});
        }
        return out;
    }

    std::vector<EvalRes> eval_conv(const Expr& e, PathState st, int depth) {
        std::vector<EvalRes> out;
        for (auto& r : eval(*e.base, std::move(st), depth)) {
            AbstractValue v = r.val;
            switch (e.conv) {
                case ConvKind::WidenSigned:
                    if (v.kind == AVKind::Int) {
                        v.int_type = e.type.kind;
                        if (v.iv.admits_negative() && !v.sext_origin) v.sext_origin = e.loc;
                    } else {
                        v = AbstractValue::top_of(e.type, prog_);
                    }
                    break;
                case ConvKind::WidenUnsigned:
                    if (v.kind == AVKind::Int) v.int_type = e.type.kind;
                    else v = AbstractValue::top_of(e.type, prog_);
                    break;
                case ConvKind::SignedToUnsigned: {
                    PathEvent ev;
                    ev.kind = PathEventKind::SignedToUnsigned;
                    ev.loc = e.loc;
                    ev.in_function = fn_.id;
                    ev.value = r.val;
                    if (r.val.kind == AVKind::Int)
                        ev.detail = Type{r.val.int_type, {}, nullptr}.str() + "->" + e.type.str();
                    emit(ev);
                    if (v.kind == AVKind::Int) {
                        v.sext_origin.reset();
                        if (v.iv.lo >= 0) v.int_type = e.type.kind;
                        else v = AbstractValue::top_of(e.type, prog_);
                    } else {
                        v = AbstractValue::top_of(e.type, prog_);
                    }
                    break;
                }
                case ConvKind::IntTruth: {
                    AbstractValue b;
                    b.kind = AVKind::Bool;
                    if (v.kind == AVKind::Int) {
                        if (v.iv == Interval::constant(0)) b.bv = Tri::False;
                        else if (!v.iv.contains(0)) b.bv = Tri::True;
                    }
                    v = std::move(b);
                    break;
                }
                case ConvKind::BoxVar: {
                    AbstractValue b;
                    b.kind = AVKind::Var;
                    switch (r.val.kind) {
                        case AVKind::Int: b.tags = tag_bit(VarTag::Int); break;
                        case AVKind::Bool: b.tags = tag_bit(VarTag::Bool); break;
                        case AVKind::Class: b.tags = tag_bit(VarTag::Ref); break;
                        default: b.tags = kTagAll; break;
                    }
                    v = std::move(b);
                    break;
                }
                case ConvKind::Upcast:
                    // The dynamic type set is unchanged by an upcast.
                    break;
            }
            out.push_back(EvalRes{std::move(r.st), std::move(v)});
        }
        return out;
    }

    // ---- calls -------------------------------------------------------------

    std::vector<EvalRes> eval_args(const std::vector<ExprPtr>& args, PathState st, int depth,
                                   std::vector<std::vector<AbstractValue>>& arg_sets,
                                   const std::vector<bool>* by_ref = nullptr) {
        // Evaluate arguments left to right, threading forks. arg_sets[i]
        // receives the argument vector for out[i]. By-ref arguments are
        // lvalues whose address is taken rather than read, so they are not
        // evaluated here; the caller seeds their cells separately.
        std::vector<EvalRes> cur;
        cur.push_back(EvalRes{std::move(st), {}});
        std::vector<std::vector<AbstractValue>> vals;
        vals.emplace_back();
        for (size_t ai = 0; ai < args.size(); ++ai) {
            if (by_ref && ai < by_ref->size() && (*by_ref)[ai]) {
                for (auto& v : vals) v.emplace_back();
                continue;
            }
            std::vector<EvalRes> next;
            std::vector<std::vector<AbstractValue>> next_vals;
            for (size_t i = 0; i < cur.size(); ++i) {
                for (auto& r : eval(*args[ai], std::move(cur[i].st), depth)) {
                    next_vals.push_back(vals[i]);
                    next_vals.back().push_back(r.val);
                    next.push_back(EvalRes{std::move(r.st), {}});
                }
            }
            cur = std::move(next);
            vals = std::move(next_vals);
        }
        arg_sets = std::move(vals);
        return cur;
    }

    static std::vector<bool> ref_flags(const FunctionDecl* callee, size_t nargs) {
        std::vector<bool> flags(nargs, false);
        if (callee)
            for (size_t i = 0; i < nargs && i < callee->params.size(); ++i)
                flags[i] = callee->params[i].by_ref;
        return flags;
    }

    // Evaluate a by-ref argument without treating it as a value read: member
    // lvalues seed the callee cell from member state directly (taking the
    // address of a field is not a use of it).
    AbstractValue ref_seed(const Expr& arg, PathState& st) {
        if (arg.kind == ExprKind::FieldAccess) {
            auto it = st.members.find(arg.decl);
            if (it != st.members.end()) return it->second;
            return AbstractValue::top_of(arg.type, prog_);
        }
        if (arg.kind == ExprKind::LocalRef) {
            if (AbstractValue* v = find_local(st, arg.name)) return *v;
        }
        return AbstractValue::top_of(arg.type, prog_);
    }

    std::vector<EvalRes> eval_call(const Expr& e, PathState st, int depth) {
        if (e.call_kind == CallKind::Intrinsic) return eval_intrinsic(e, std::move(st), depth);

        const FunctionDecl* callee =
            e.decl.empty() ? nullptr : prog_.find_function(e.decl);

        // Receiver first (it is written before the arguments).
        std::vector<EvalRes> recvs;
        AbstractValue recv_val;
        bool has_recv = false;
        if ((e.call_kind == CallKind::Method || e.call_kind == CallKind::Virtual) && e.base) {
            recvs = eval(*e.base, std::move(st), depth);
            has_recv = true;
        } else {
            recvs.push_back(EvalRes{std::move(st), {}});
            if (e.call_kind == CallKind::Indirect && e.base) {
                // The callee expression itself is evaluated for its effects.
                std::vector<EvalRes> tmp;
                for (auto& r : recvs)
                    for (auto& x : eval(*e.base, std::move(r.st), depth))
                        tmp.push_back(std::move(x));
                recvs = std::move(tmp);
            }
        }

        std::vector<bool> refs = ref_flags(callee, e.args.size());
        std::vector<EvalRes> out;
        for (auto& rec : recvs) {
            if (has_recv) recv_val = rec.val;
            std::vector<std::vector<AbstractValue>> arg_sets;
            auto arged = eval_args(e.args, std::move(rec.st), depth, arg_sets, &refs);
            for (size_t i = 0; i < arged.size(); ++i) {
                PathState cur = std::move(arged[i].st);
                bool inlinable = callee && callee->unit == fn_.unit &&
                                 e.call_kind != CallKind::Virtual &&
                                 e.call_kind != CallKind::Indirect &&
                                 depth < cfg_.inline_depth && callee->body;
                if (inlinable) {
                    // Re-evaluate by-ref argument seeds (address-of, not read).
                    std::vector<AbstractValue> args = arg_sets[i];
                    for (size_t k = 0; k < callee->params.size() && k < e.args.size(); ++k)
                        if (callee->params[k].by_ref) args[k] = ref_seed(*e.args[k], cur);
                    for (auto& fl :
                         inline_call(*callee, has_recv ? &recv_val : nullptr, args, cur, depth))
                        out.push_back(std::move(fl));
                } else {
                    // Out-of-unit, virtual, indirect or depth-capped call:
                    // no effect on member state; result unknown.
                    out.push_back(
                        EvalRes{std::move(cur), AbstractValue::top_of(e.type, prog_)});
                }
            }
        }
        return out;
    }

    std::vector<EvalRes> inline_call(const FunctionDecl& callee, const AbstractValue* recv,
                                     const std::vector<AbstractValue>& args, PathState st,
                                     int depth) {
        auto saved_scopes = st.scopes;
        st.scopes.clear();
        st.scopes.emplace_back();
        for (size_t i = 0; i < callee.params.size() && i < args.size(); ++i)
            st.scopes.front()[callee.params[i].name] = args[i];
        if (recv) st.scopes.front()["this"] = *recv;

        std::vector<EvalRes> out;
        for (auto& fl : exec_stmt(*callee.body, std::move(st), depth + 1)) {
            fl.st.scopes = saved_scopes;
            AbstractValue ret = fl.returned ? std::move(fl.ret)
                                            : AbstractValue::top_of(callee.ret, prog_);
            out.push_back(EvalRes{std::move(fl.st), std::move(ret)});
        }
        return out;
    }

    // Run the zero-argument constructor chain for `cls` and its bases,
    // base-first, on top of the current state. `dyn` is the dynamic class of
    // the object under construction.
    std::vector<PathState> run_ctor_chain(const std::string& cls, const std::string& dyn,
                                          PathState st, int depth) {
        std::vector<std::string> chain;  // base-first
        for (std::string c = cls; !c.empty();) {
            chain.insert(chain.begin(), c);
            const ClassDecl* cd = prog_.find_class(c);
            c = cd ? cd->base : std::string();
        }
        std::vector<PathState> cur{std::move(st)};
        for (const auto& cname : chain) {
            const ClassDecl* cd = prog_.find_class(cname);
            if (!cd || !cd->ctor || cd->ctor->unit != fn_.unit || depth > cfg_.inline_depth)
                continue;
            AbstractValue self;
            self.kind = AVKind::Class;
            self.classes.insert(dyn);
            std::vector<PathState> next;
            for (auto& s : cur)
                for (auto& r : inline_call(*cd->ctor, &self, {}, std::move(s), depth))
                    next.push_back(std::move(r.st));
            cur = std::move(next);
        }
        return cur;
    }

    std::vector<EvalRes> eval_new(const Expr& e, PathState st, int depth) {
        const ClassDecl* cls = prog_.find_class(e.name);
        AbstractValue obj;
        obj.kind = AVKind::Class;
        obj.classes.insert(e.name);

        std::vector<bool> refs =
            ref_flags(cls && cls->ctor ? cls->ctor : nullptr, e.args.size());
        std::vector<std::vector<AbstractValue>> arg_sets;
        auto arged = eval_args(e.args, std::move(st), depth, arg_sets, &refs);

        std::vector<EvalRes> out;
        for (size_t i = 0; i < arged.size(); ++i) {
            PathState cur = std::move(arged[i].st);
            bool local_ctor = cls && cls->ctor && cls->ctor->unit == fn_.unit &&
                              depth < cfg_.inline_depth;
            if (local_ctor) {
                // Base chain first, then the class's own constructor.
                std::vector<PathState> pre;
                if (!cls->base.empty())
                    pre = run_ctor_chain(cls->base, e.name, std::move(cur), depth + 1);
                else
                    pre.push_back(std::move(cur));
                std::vector<AbstractValue> args = arg_sets[i];
                for (size_t k = 0; k < cls->ctor->params.size() && k < e.args.size(); ++k)
                    if (cls->ctor->params[k].by_ref) args[k] = ref_seed(*e.args[k], pre.front());
                for (auto& s : pre)
                    for (auto& r : inline_call(*cls->ctor, &obj, args, std::move(s), depth))
                        out.push_back(EvalRes{std::move(r.st), obj});
            } else if (cls && !cls->ctor && cls->unit == fn_.unit && !cls->base.empty() &&
                       depth < cfg_.inline_depth) {
                // Implicit constructor still chains same-unit bases.
                for (auto& s : run_ctor_chain(cls->base, e.name, std::move(cur), depth + 1))
                    out.push_back(EvalRes{std::move(s), obj});
            } else {
                out.push_back(EvalRes{std::move(cur), obj});
            }
        }
        return out;
    }

    std::vector<EvalRes> eval_intrinsic(const Expr& e, PathState st, int depth) {
        std::vector<std::vector<AbstractValue>> arg_sets;
        auto arged = eval_args(e.args, std::move(st), depth, arg_sets);

        std::vector<EvalRes> out;
        for (size_t i = 0; i < arged.size(); ++i) {
            PathState cur = std::move(arged[i].st);
            const auto& args = arg_sets[i];
            AbstractValue v;
            if (e.name == "extern_input") {
                v.kind = AVKind::Var;
                v.tags = kTagAll;
                v.tainted = true;
            } else if (e.name == "tag_of") {
                v.kind = AVKind::Tag;
                if (!args.empty() && args[0].kind == AVKind::Var) {
                    TagMask m = args[0].tags;
                    if (m == tag_bit(VarTag::Int)) v.tag_value = VarTag::Int;
                    else if (m == tag_bit(VarTag::Bool)) v.tag_value = VarTag::Bool;
                    else if (m == tag_bit(VarTag::Ref)) v.tag_value = VarTag::Ref;
                }
                if (!e.args.empty() && e.args[0]->kind == ExprKind::LocalRef)
                    v.tag_origin = e.args[0]->name;
            } else if (e.name == "as_int" || e.name == "as_int8" || e.name == "as_bool") {
                PathEvent ev;
                ev.kind = PathEventKind::VarAccess;
                ev.loc = e.loc;
                ev.in_function = fn_.id;
                ev.accessor = e.name;
                if (!args.empty()) ev.value = args[0];
                emit(ev);
                v = AbstractValue::top_of(e.type, prog_);
            } else if (e.name == "alloc" || e.name == "read_buf") {
                size_t size_idx = e.name == "alloc" ? 0 : 1;
                if (args.size() > size_idx) {
                    PathEvent ev;
                    ev.kind = PathEventKind::SizeSink;
                    ev.loc = e.loc;
                    ev.in_function = fn_.id;
                    ev.value = args[size_idx];
                    ev.detail = e.name;
                    emit(ev);
                }
                v = AbstractValue::top_of(e.type, prog_);
            } else {
                v = AbstractValue::top_of(e.type, prog_);
            }
            out.push_back(EvalRes{std::move(cur), std::move(v)});
        }
        return out;
    }
};

}  // namespace

FunctionSummary explore_function(const FunctionDecl& fn, const ProgramAST& prog,
                                 const EngineConfig& cfg, const EventSink& sink) {
    Explorer ex(fn, prog, cfg, sink);
    return ex.run();
}

// ---------------------------------------------------------------------------
// Candidate classification
// ---------------------------------------------------------------------------

std::vector<GarbageRead> classify_candidates(const std::vector<FunctionSummary>& summaries,
                                             const ProgramAST& prog,
                                             const std::string& unit_name) {
    // Constructor summaries by owner class, for the suppression rule.
    std::map<std::string, const FunctionSummary*> ctor_sums;
    for (const auto& s : summaries) {
        const FunctionDecl* f = prog.find_function(s.function);
        if (f && f->is_ctor) ctor_sums[f->owner_class] = &s;
    }

    std::vector<GarbageRead> out;
    for (const auto& s : summaries) {
        const FunctionDecl* f = prog.find_function(s.function);
        for (const auto& use : s.use_without_def_set) {
            const std::string owner = declid_owner(use.member);
            bool in_own_ctor = f && f->is_ctor && f->owner_class == owner;
            bool suppressed = false;
            if (!in_own_ctor) {
                const ClassDecl* owner_cls = prog.find_class(owner);
                if (owner_cls && owner_cls->unit == unit_name && owner_cls->ctor) {
                    auto it = ctor_sums.find(owner);
                    if (it != ctor_sums.end() &&
                        it->second->def_set.count(use.member) > 0)
                        suppressed = true;
                }
            }
            if (!suppressed)
                out.push_back(GarbageRead{use.member, s.function, use.loc,
                                          use.member + "->" + s.function});
        }
    }

    std::sort(out.begin(), out.end(), [](const GarbageRead& a, const GarbageRead& b) {
        if (!(a.loc == b.loc)) return a.loc < b.loc;
        if (a.member != b.member) return a.member < b.member;
        return a.function < b.function;
    });
    // One candidate per (member, use site); the lexicographically smallest
    // containing function wins, which favors the function that textually
    // contains the read.
    out.erase(std::unique(out.begin(), out.end(),
                          [](const GarbageRead& a, const GarbageRead& b) {
                              return a.member == b.member && a.loc == b.loc;
                          }),
              out.end());
    return out;
}

}  // namespace moa
