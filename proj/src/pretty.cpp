#include <sstream>

#include "moa/frontend.hpp"

// Canonical source renderer. Prints the *surface* form: implicit conversion
// nodes inserted by sema are transparent, resolved implicit-this field reads
// print as bare names only if they were written that way — we don't know, so
// they print qualified; round-tripping is still structurally stable because
// the second parse resolves them to the same field decls.

namespace moa {

namespace {

class Printer {
  public:
    std::string run(const TranslationUnit& tu) {
        for (const auto& imp : tu.imports) line("import " + imp.name + ";");
        if (!tu.imports.empty() && (!tu.classes.empty() || !tu.functions.empty())) line("");
        for (const auto& cls : tu.classes) {
            print_class(*cls);
            line("");
        }
        for (const auto& fn : tu.functions) {
            print_function(*fn);
            line("");
        }
        // normalize: exactly one trailing newline
        while (out_.size() >= 2 && out_[out_.size() - 1] == '\n' && out_[out_.size() - 2] == '\n')
            out_.pop_back();
        return out_;
    }

  private:
    std::string out_;
    int indent_ = 0;

    void line(const std::string& s) {
        if (!s.empty())
            out_ += std::string(static_cast<size_t>(indent_) * 2, ' ') + s;
        out_ += '\n';
    }

    void print_class(const ClassDecl& cls) {
        std::string head = "class " + cls.name;
        if (!cls.base.empty()) head += " : " + cls.base;
        line(head + " {");
        ++indent_;
        for (const auto& f : cls.fields) line(f.name + ": " + f.type.str() + ";");
        for (const auto& m : cls.methods) print_function(*m);
        --indent_;
        line("}");
    }

    void print_function(const FunctionDecl& fn) {
        std::string head;
        if (fn.is_ctor) {
            head = fn.name + "(" + params_str(fn.params) + ")";
        } else {
            if (fn.is_virtual && !fn.owner_class.empty()) head += "virtual ";
            head += "fn " + fn.name + "(" + params_str(fn.params) + ")";
            if (fn.ret.kind != TypeKind::Void) head += " -> " + fn.ret.str();
        }
        line(head + " {");
        ++indent_;
        if (fn.body)
            for (const auto& s : fn.body->body) print_stmt(*s);
        --indent_;
        line("}");
    }

    static std::string params_str(const std::vector<Param>& params) {
        std::string s;
        for (size_t i = 0; i < params.size(); ++i) {
            if (i) s += ", ";
            s += params[i].name + ": ";
            if (params[i].by_ref) s += "&";
            s += params[i].type.str();
        }
        return s;
    }

    void print_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                line("{");
                ++indent_;
                for (const auto& c : s.body) print_stmt(*c);
                --indent_;
                line("}");
                return;
            case StmtKind::If: {
                line("if (" + expr(*s.cond) + ") {");
                ++indent_;
                print_body(*s.then_stmt);
                --indent_;
                if (s.else_stmt) {
                    line("} else {");
                    ++indent_;
                    print_body(*s.else_stmt);
                    --indent_;
                }
                line("}");
                return;
            }
            case StmtKind::While:
                line("while (" + expr(*s.cond) + ") {");
                ++indent_;
                print_body(*s.then_stmt);
                --indent_;
                line("}");
                return;
            case StmtKind::Return:
                line(s.value ? "return " + expr(*s.value) + ";" : "return;");
                return;
            case StmtKind::VarDecl:
                line(s.name + ": " + s.decl_type.str() + " = " + expr(*s.value) + ";");
                return;
            case StmtKind::Assign:
                line(expr(*s.target) + " = " + expr(*s.value) + ";");
                return;
            case StmtKind::ExprStmt:
                line(expr(*s.value) + ";");
                return;
        }
    }

    // A nested block prints its children inline (the brace was emitted by the
    // caller); anything else prints as a single statement.
    void print_body(const Stmt& s) {
        if (s.kind == StmtKind::Block)
            for (const auto& c : s.body) print_stmt(*c);
        else
            print_stmt(s);
    }

    static const char* bin_op_str(BinaryOp op) {
        switch (op) {
            case BinaryOp::Add: return "+";
            case BinaryOp::Sub: return "-";
            case BinaryOp::Mul: return "*";
            case BinaryOp::Div: return "/";
            case BinaryOp::Eq: return "==";
            case BinaryOp::Ne: return "!=";
            case BinaryOp::Lt: return "<";
            case BinaryOp::Le: return "<=";
            case BinaryOp::Gt: return ">";
            case BinaryOp::Ge: return ">=";
        }
        return "?";
    }

    std::string expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: return std::to_string(e.ival);
            case ExprKind::BoolLit: return e.bval ? "true" : "false";
            case ExprKind::This: return "this";
            case ExprKind::LocalRef: return e.name;
            case ExprKind::FnConst: return "&" + e.name;
            case ExprKind::TagConst: return var_tag_name(e.tag);
            case ExprKind::FieldAccess:
                return e.base ? expr(*e.base) + "." + e.name : "this." + e.name;
            case ExprKind::Unary:
                return std::string(e.un_op == UnaryOp::Not ? "!" : "-") + paren(*e.base);
            case ExprKind::Binary:
                return paren(*e.base) + " " + bin_op_str(e.bin_op) + " " + paren(*e.rhs);
            case ExprKind::Call: {
                std::string callee;
                switch (e.call_kind) {
                    case CallKind::Method:
                    case CallKind::Virtual:
                        callee = (e.base ? expr(*e.base) : std::string("this")) + "." + e.name;
                        break;
                    case CallKind::Free:
                    case CallKind::Intrinsic:
                        callee = e.name.empty() && e.base ? expr(*e.base) : e.name;
                        break;
                    default:
                        callee = e.base ? paren(*e.base) : e.name;
                        break;
                }
                return callee + "(" + args(e.args) + ")";
            }
            case ExprKind::New: return "new " + e.name + "(" + args(e.args) + ")";
            case ExprKind::Downcast: return "downcast<" + e.name + ">(" + expr(*e.base) + ")";
            case ExprKind::Cast:
                return "cast<" + e.cast_type.str() + ">(" + expr(*e.base) + ")";
            case ExprKind::ImplicitConv: return expr(*e.base);
        }
        return "?";
    }

    std::string paren(const Expr& e) {
        const Expr& x = e.kind == ExprKind::ImplicitConv ? *e.base : e;
        if (x.kind == ExprKind::Binary) return "(" + expr(x) + ")";
        return expr(x);
    }

    std::string args(const std::vector<ExprPtr>& list) {
        std::string s;
        for (size_t i = 0; i < list.size(); ++i) {
            if (i) s += ", ";
            s += expr(*list[i]);
        }
        return s;
    }
};

}  // namespace

std::string pretty_print(const TranslationUnit& tu) {
    Printer p;
    return p.run(tu);
}

}  // namespace moa
