#include <cassert>

#include "moa/frontend.hpp"
#include "moa/lexer.hpp"

// Recursive-descent parser. Builds the raw AST; all name binding and type
// checking happens in sema.cpp. Error recovery is coarse: on a statement-level
// error we synchronize to the next ';' or '}', on a declaration-level error to
// the next top-level keyword.

namespace moa {

std::string unit_name_from_path(const std::string& path) {
    std::string base = path;
    auto slash = base.find_last_of("/\\");
    if (slash != std::string::npos) base = base.substr(slash + 1);
    if (base.size() > 3 && base.compare(base.size() - 3, 3, ".mo") == 0)
        base = base.substr(0, base.size() - 3);
    return base;
}

namespace {

class Parser {
  public:
    Parser(std::vector<Token> toks, DiagList& diags) : toks_(std::move(toks)), diags_(diags) {}

    UnitPtr run(const std::string& path) {
        auto tu = std::make_unique<TranslationUnit>();
        tu->path = path;
        tu->name = unit_name_from_path(path);
        while (!at(Tok::Eof)) {
            size_t before = pos_;
            if (at(Tok::KwImport)) {
                parse_import(*tu);
            } else if (at(Tok::KwClass)) {
                parse_class(*tu);
            } else if (at(Tok::KwFn)) {
                auto fn = parse_function(/*owner=*/"", /*allow_virtual=*/false);
                if (fn) tu->functions.push_back(std::move(fn));
            } else {
                error(peek().loc, "expected 'import', 'class' or 'fn' at top level");
                sync_top();
            }
            if (pos_ == before) next();  // always make progress
        }
        return tu;
    }

  private:
    std::vector<Token> toks_;
    DiagList& diags_;
    size_t pos_ = 0;
    bool had_error_ = false;

    const Token& peek(int off = 0) const {
        size_t p = pos_ + static_cast<size_t>(off);
        return p < toks_.size() ? toks_[p] : toks_.back();
    }
    bool at(Tok k) const { return peek().kind == k; }
    const Token& next() {
        const Token& t = peek();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(Tok k) {
        if (at(k)) {
            next();
            return true;
        }
        return false;
    }
    const Token* expect(Tok k, const char* what) {
        if (at(k)) return &next();
        error(peek().loc, std::string("expected ") + what + ", found " + tok_name(peek().kind));
        return nullptr;
    }
    void error(const SourceLoc& loc, std::string msg) {
        had_error_ = true;
        diags_.push_back({loc, std::move(msg)});
    }
    void sync_top() {
        while (!at(Tok::Eof) && !at(Tok::KwImport) && !at(Tok::KwClass) && !at(Tok::KwFn)) next();
    }
    void sync_stmt() {
        while (!at(Tok::Eof) && !at(Tok::Semi) && !at(Tok::RBrace)) next();
        accept(Tok::Semi);
    }

    void parse_import(TranslationUnit& tu) {
        SourceLoc loc = peek().loc;
        next();  // import
        const Token* name = expect(Tok::Ident, "unit name");
        if (!name) {
            sync_top();
            return;
        }
        expect(Tok::Semi, "';'");
        tu.imports.push_back({name->text, loc});
    }

    // type = builtin | ident '*' | fn '(' types ')' ['->' type]
    bool parse_type(Type& out) {
        switch (peek().kind) {
            case Tok::KwI8: next(); out = Type::i8(); return true;
            case Tok::KwI32: next(); out = Type::i32(); return true;
            case Tok::KwU8: next(); out = Type::u8(); return true;
            case Tok::KwU32: next(); out = Type::u32(); return true;
            case Tok::KwBool: next(); out = Type::boolean(); return true;
            case Tok::KwVar: next(); out = Type::var(); return true;
            case Tok::KwTag: next(); out = Type::tag(); return true;
            case Tok::KwBuf: next(); out = Type::buf(); return true;
            case Tok::Ident: {
                std::string cls = next().text;
                if (!expect(Tok::Star, "'*' after class name in type")) return false;
                out = Type::class_ptr(cls);
                return true;
            }
            case Tok::KwFn: {
                next();
                if (!expect(Tok::LParen, "'('")) return false;
                auto sig = std::make_shared<FnSig>();
                if (!at(Tok::RParen)) {
                    do {
                        Type pt;
                        if (!parse_type(pt)) return false;
                        sig->params.push_back(std::move(pt));
                    } while (accept(Tok::Comma));
                }
                if (!expect(Tok::RParen, "')'")) return false;
                if (accept(Tok::Arrow)) {
                    if (!parse_type(sig->ret)) return false;
                }
                out = Type::fn_ref(std::move(sig));
                return true;
            }
            default:
                error(peek().loc, std::string("expected type, found ") + tok_name(peek().kind));
                return false;
        }
    }

    void parse_class(TranslationUnit& tu) {
        SourceLoc loc = peek().loc;
        next();  // class
        const Token* name = expect(Tok::Ident, "class name");
        if (!name) {
            sync_top();
            return;
        }
        auto cls = std::make_unique<ClassDecl>();
        cls->name = name->text;
        cls->loc = loc;
        cls->unit = tu.name;
        if (accept(Tok::Colon)) {
            const Token* base = expect(Tok::Ident, "base class name");
            if (base) cls->base = base->text;
        }
        if (!expect(Tok::LBrace, "'{'")) {
            sync_top();
            return;
        }
        bool saw_ctor = false;
        while (!at(Tok::RBrace) && !at(Tok::Eof)) {
            size_t before = pos_;
            if (at(Tok::KwVirtual) || at(Tok::KwFn)) {
                auto m = parse_function(cls->name, /*allow_virtual=*/true);
                if (m) cls->methods.push_back(std::move(m));
            } else if (at(Tok::Ident) && peek(1).kind == Tok::LParen &&
                       peek().text == cls->name) {
                // constructor: ClassName(params) block
                auto ctor = parse_ctor(cls->name);
                if (ctor) {
                    if (saw_ctor) {
                        error(ctor->loc, "class '" + cls->name + "' already has a constructor");
                    } else {
                        saw_ctor = true;
                        cls->methods.push_back(std::move(ctor));
                    }
                }
            } else if (at(Tok::Ident) && peek(1).kind == Tok::Colon) {
                // field
                FieldDecl f;
                f.name = peek().text;
                f.loc = peek().loc;
                next();
                next();  // ':'
                if (!parse_type(f.type)) {
                    sync_stmt();
                    continue;
                }
                expect(Tok::Semi, "';'");
                f.id = make_member_id(cls->name, f.name);
                cls->fields.push_back(std::move(f));
            } else {
                error(peek().loc, "expected field, constructor or method in class body");
                sync_stmt();
            }
            if (pos_ == before) next();
        }
        expect(Tok::RBrace, "'}'");
        // Wire the ctor pointer after the vector stops reallocating.
        for (auto& m : cls->methods)
            if (m->is_ctor) cls->ctor = m.get();
        tu.classes.push_back(std::move(cls));
    }

    std::unique_ptr<FunctionDecl> parse_ctor(const std::string& owner) {
        auto fn = std::make_unique<FunctionDecl>();
        fn->loc = peek().loc;
        fn->name = next().text;  // class name
        fn->owner_class = owner;
        fn->is_ctor = true;
        fn->id = make_member_id(owner, fn->name);
        fn->ret = Type::void_();
        if (!parse_params(fn->params)) return nullptr;
        fn->body = parse_block();
        if (fn->body) fn->end_loc = fn->body->loc;  // overwritten below with closing brace
        fn->end_loc = last_brace_;
        return fn;
    }

    // [virtual] fn name(params) [-> type] block
    std::unique_ptr<FunctionDecl> parse_function(const std::string& owner, bool allow_virtual) {
        auto fn = std::make_unique<FunctionDecl>();
        fn->loc = peek().loc;
        if (at(Tok::KwVirtual)) {
            if (!allow_virtual) error(peek().loc, "'virtual' is only valid on methods");
            fn->is_virtual = true;
            next();
        }
        if (!expect(Tok::KwFn, "'fn'")) {
            sync_top();
            return nullptr;
        }
        const Token* name = expect(Tok::Ident, "function name");
        if (!name) {
            sync_top();
            return nullptr;
        }
        fn->name = name->text;
        fn->owner_class = owner;
        fn->id = owner.empty() ? name->text : make_member_id(owner, name->text);
        if (!parse_params(fn->params)) return nullptr;
        if (accept(Tok::Arrow)) {
            if (!parse_type(fn->ret)) return nullptr;
        } else {
            fn->ret = Type::void_();
        }
        fn->body = parse_block();
        fn->end_loc = last_brace_;
        return fn;
    }

    bool parse_params(std::vector<Param>& out) {
        if (!expect(Tok::LParen, "'('")) return false;
        if (!at(Tok::RParen)) {
            do {
                Param p;
                const Token* name = expect(Tok::Ident, "parameter name");
                if (!name) return false;
                p.name = name->text;
                p.loc = name->loc;
                if (!expect(Tok::Colon, "':'")) return false;
                if (accept(Tok::Amp)) p.by_ref = true;
                if (!parse_type(p.type)) return false;
                out.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        if (!expect(Tok::RParen, "')'")) return false;
        return true;
    }

    StmtPtr parse_block() {
        SourceLoc loc = peek().loc;
        if (!expect(Tok::LBrace, "'{'")) return nullptr;
        auto block = std::make_unique<Stmt>(StmtKind::Block, loc);
        while (!at(Tok::RBrace) && !at(Tok::Eof)) {
            size_t before = pos_;
            auto s = parse_stmt();
            if (s) block->body.push_back(std::move(s));
            if (pos_ == before) next();
        }
        last_brace_ = peek().loc;
        expect(Tok::RBrace, "'}'");
        return block;
    }

    StmtPtr parse_stmt() {
        switch (peek().kind) {
            case Tok::LBrace: return parse_block();
            case Tok::KwIf: {
                SourceLoc loc = next().loc;
                auto s = std::make_unique<Stmt>(StmtKind::If, loc);
                if (!expect(Tok::LParen, "'('")) { sync_stmt(); return nullptr; }
                s->cond = parse_expr();
                if (!s->cond) { sync_stmt(); return nullptr; }
                if (!expect(Tok::RParen, "')'")) { sync_stmt(); return nullptr; }
                s->then_stmt = parse_stmt();
                if (accept(Tok::KwElse)) s->else_stmt = parse_stmt();
                return s;
            }
            case Tok::KwWhile: {
                SourceLoc loc = next().loc;
                auto s = std::make_unique<Stmt>(StmtKind::While, loc);
                if (!expect(Tok::LParen, "'('")) { sync_stmt(); return nullptr; }
                s->cond = parse_expr();
                if (!s->cond) { sync_stmt(); return nullptr; }
                if (!expect(Tok::RParen, "')'")) { sync_stmt(); return nullptr; }
                s->then_stmt = parse_stmt();
                return s;
            }
            case Tok::KwReturn: {
                SourceLoc loc = next().loc;
                auto s = std::make_unique<Stmt>(StmtKind::Return, loc);
                if (!at(Tok::Semi)) {
                    s->value = parse_expr();
                    if (!s->value) { sync_stmt(); return nullptr; }
                }
                expect(Tok::Semi, "';'");
                return s;
            }
            default: break;
        }
        // Local declaration: ident ':' type '=' expr ';'
        if (at(Tok::Ident) && peek(1).kind == Tok::Colon) {
            auto s = std::make_unique<Stmt>(StmtKind::VarDecl, peek().loc);
            s->name = next().text;
            next();  // ':'
            if (!parse_type(s->decl_type)) { sync_stmt(); return nullptr; }
            if (!expect(Tok::Assign, "'=' (locals must be initialized)")) {
                sync_stmt();
                return nullptr;
            }
            s->value = parse_expr();
            if (!s->value) { sync_stmt(); return nullptr; }
            expect(Tok::Semi, "';'");
            return s;
        }
        // Assignment or expression statement.
        SourceLoc loc = peek().loc;
        auto e = parse_expr();
        if (!e) { sync_stmt(); return nullptr; }
        if (accept(Tok::Assign)) {
            auto s = std::make_unique<Stmt>(StmtKind::Assign, loc);
            s->target = std::move(e);
            s->value = parse_expr();
            if (!s->value) { sync_stmt(); return nullptr; }
            expect(Tok::Semi, "';'");
            return s;
        }
        auto s = std::make_unique<Stmt>(StmtKind::ExprStmt, loc);
        s->value = std::move(e);
        expect(Tok::Semi, "';'");
        return s;
    }

    ExprPtr parse_expr() { return parse_equality(); }

    ExprPtr parse_equality() {
        auto lhs = parse_relational();
        if (!lhs) return nullptr;
        while (at(Tok::Eq) || at(Tok::Ne)) {
            BinaryOp op = at(Tok::Eq) ? BinaryOp::Eq : BinaryOp::Ne;
            SourceLoc loc = next().loc;
            auto rhs = parse_relational();
            if (!rhs) return nullptr;
            auto e = std::make_unique<Expr>(ExprKind::Binary, loc);
            e->bin_op = op;
            e->base = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        auto lhs = parse_additive();
        if (!lhs) return nullptr;
        while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
            BinaryOp op = at(Tok::Lt)   ? BinaryOp::Lt
                          : at(Tok::Le) ? BinaryOp::Le
                          : at(Tok::Gt) ? BinaryOp::Gt
                                        : BinaryOp::Ge;
            SourceLoc loc = next().loc;
            auto rhs = parse_additive();
            if (!rhs) return nullptr;
            auto e = std::make_unique<Expr>(ExprKind::Binary, loc);
            e->bin_op = op;
            e->base = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        auto lhs = parse_multiplicative();
        if (!lhs) return nullptr;
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinaryOp op = at(Tok::Plus) ? BinaryOp::Add : BinaryOp::Sub;
            SourceLoc loc = next().loc;
            auto rhs = parse_multiplicative();
            if (!rhs) return nullptr;
            auto e = std::make_unique<Expr>(ExprKind::Binary, loc);
            e->bin_op = op;
            e->base = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        auto lhs = parse_unary();
        if (!lhs) return nullptr;
        while (at(Tok::Star) || at(Tok::Slash)) {
            BinaryOp op = at(Tok::Star) ? BinaryOp::Mul : BinaryOp::Div;
            SourceLoc loc = next().loc;
            auto rhs = parse_unary();
            if (!rhs) return nullptr;
            auto e = std::make_unique<Expr>(ExprKind::Binary, loc);
            e->bin_op = op;
            e->base = std::move(lhs);
            e->rhs = std::move(rhs);
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Bang) || at(Tok::Minus)) {
            UnaryOp op = at(Tok::Bang) ? UnaryOp::Not : UnaryOp::Neg;
            SourceLoc loc = next().loc;
            auto operand = parse_unary();
            if (!operand) return nullptr;
            auto e = std::make_unique<Expr>(ExprKind::Unary, loc);
            e->un_op = op;
            e->base = std::move(operand);
            return e;
        }
        if (at(Tok::Amp)) {
            SourceLoc loc = next().loc;
            const Token* name = expect(Tok::Ident, "function name after '&'");
            if (!name) return nullptr;
            auto e = std::make_unique<Expr>(ExprKind::FnConst, loc);
            e->name = name->text;
            return e;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        auto e = parse_primary();
        if (!e) return nullptr;
        for (;;) {
            if (accept(Tok::Dot)) {
                const Token* name = expect(Tok::Ident, "member name after '.'");
                if (!name) return nullptr;
                if (at(Tok::LParen)) {
                    auto call = std::make_unique<Expr>(ExprKind::Call, name->loc);
                    call->name = name->text;
                    call->base = std::move(e);  // receiver
                    call->call_kind = CallKind::Method;  // sema may turn into Virtual
                    if (!parse_args(call->args)) return nullptr;
                    e = std::move(call);
                } else {
                    auto fa = std::make_unique<Expr>(ExprKind::FieldAccess, name->loc);
                    fa->name = name->text;
                    fa->base = std::move(e);
                    e = std::move(fa);
                }
                continue;
            }
            if (at(Tok::LParen)) {
                // Call on an arbitrary expression. Sema sorts bare identifiers
                // into direct/intrinsic calls and leaves the rest indirect.
                auto call = std::make_unique<Expr>(ExprKind::Call, e->loc);
                call->call_kind = CallKind::Indirect;
                call->base = std::move(e);
                if (!parse_args(call->args)) return nullptr;
                e = std::move(call);
                continue;
            }
            break;
        }
        return e;
    }

    bool parse_args(std::vector<ExprPtr>& out) {
        if (!expect(Tok::LParen, "'('")) return false;
        if (!at(Tok::RParen)) {
            do {
                auto a = parse_expr();
                if (!a) return false;
                out.push_back(std::move(a));
            } while (accept(Tok::Comma));
        }
        return expect(Tok::RParen, "')'") != nullptr;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::IntLit: {
                auto e = std::make_unique<Expr>(ExprKind::IntLit, t.loc);
                e->ival = t.ival;
                next();
                return e;
            }
            case Tok::KwTrue:
            case Tok::KwFalse: {
                auto e = std::make_unique<Expr>(ExprKind::BoolLit, t.loc);
                e->bval = t.kind == Tok::KwTrue;
                next();
                return e;
            }
            case Tok::KwThis: {
                auto e = std::make_unique<Expr>(ExprKind::This, t.loc);
                next();
                return e;
            }
            case Tok::Ident: {
                // Plain name; sema classifies (local, field-of-this, fn, tag const).
                auto e = std::make_unique<Expr>(ExprKind::LocalRef, t.loc);
                e->name = t.text;
                next();
                return e;
            }
            case Tok::LParen: {
                next();
                auto e = parse_expr();
                if (!e) return nullptr;
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::KwNew: {
                SourceLoc loc = next().loc;
                const Token* name = expect(Tok::Ident, "class name after 'new'");
                if (!name) return nullptr;
                auto e = std::make_unique<Expr>(ExprKind::New, loc);
                e->name = name->text;
                if (!parse_args(e->args)) return nullptr;
                return e;
            }
            case Tok::KwDowncast: {
                SourceLoc loc = next().loc;
                if (!expect(Tok::Lt, "'<'")) return nullptr;
                const Token* name = expect(Tok::Ident, "class name in downcast");
                if (!name) return nullptr;
                if (!expect(Tok::Gt, "'>'")) return nullptr;
                if (!expect(Tok::LParen, "'('")) return nullptr;
                auto operand = parse_expr();
                if (!operand) return nullptr;
                if (!expect(Tok::RParen, "')'")) return nullptr;
                auto e = std::make_unique<Expr>(ExprKind::Downcast, loc);
                e->name = name->text;
                e->base = std::move(operand);
                return e;
            }
            case Tok::KwCast: {
                SourceLoc loc = next().loc;
                if (!expect(Tok::Lt, "'<'")) return nullptr;
                Type ty;
                if (!parse_type(ty)) return nullptr;
                if (!expect(Tok::Gt, "'>'")) return nullptr;
                if (!expect(Tok::LParen, "'('")) return nullptr;
                auto operand = parse_expr();
                if (!operand) return nullptr;
                if (!expect(Tok::RParen, "')'")) return nullptr;
                auto e = std::make_unique<Expr>(ExprKind::Cast, loc);
                e->cast_type = std::move(ty);
                e->base = std::move(operand);
                return e;
            }
            default:
                error(t.loc, std::string("expected expression, found ") + tok_name(t.kind));
                return nullptr;
        }
    }

    SourceLoc last_brace_;
};

}  // namespace

UnitPtr parse_unit_syntax(const std::string& source, const std::string& path, DiagList& diags) {
    auto toks = lex(source, path, diags);
    Parser p(std::move(toks), diags);
    return p.run(path);
}

}  // namespace moa
