#include "moa/ast.hpp"

#include <algorithm>
#include <set>

namespace moa {

std::string Type::str() const {
    switch (kind) {
        case TypeKind::Void: return "void";
        case TypeKind::I8: return "i8";
        case TypeKind::I32: return "i32";
        case TypeKind::U8: return "u8";
        case TypeKind::U32: return "u32";
        case TypeKind::Bool: return "bool";
        case TypeKind::Var: return "var";
        case TypeKind::Tag: return "tag";
        case TypeKind::Buf: return "buf";
        case TypeKind::ClassPtr: return class_name + "*";
        case TypeKind::FnRef: {
            std::string s = "fn(";
            if (fn_sig) {
                for (size_t i = 0; i < fn_sig->params.size(); ++i) {
                    if (i) s += ", ";
                    s += fn_sig->params[i].str();
                }
            }
            s += ")";
            if (fn_sig && fn_sig->ret.kind != TypeKind::Void) s += " -> " + fn_sig->ret.str();
            return s;
        }
    }
    return "?";
}

bool operator==(const Type& a, const Type& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == TypeKind::ClassPtr) return a.class_name == b.class_name;
    if (a.kind == TypeKind::FnRef) {
        if (!a.fn_sig || !b.fn_sig) return a.fn_sig == b.fn_sig;
        if (a.fn_sig->params.size() != b.fn_sig->params.size()) return false;
        for (size_t i = 0; i < a.fn_sig->params.size(); ++i)
            if (!(a.fn_sig->params[i] == b.fn_sig->params[i])) return false;
        return a.fn_sig->ret == b.fn_sig->ret;
    }
    return true;
}

bool ProgramAST::is_subclass_of(const std::string& derived, const std::string& base) const {
    std::string cur = derived;
    std::set<std::string> seen;  // hierarchy cycles are rejected by sema, belt and braces
    while (!cur.empty() && seen.insert(cur).second) {
        if (cur == base) return true;
        const ClassDecl* c = find_class(cur);
        if (!c) return false;
        cur = c->base;
    }
    return false;
}

std::vector<std::string> ProgramAST::subclass_cone(const std::string& c) const {
    std::vector<std::string> out;
    for (const auto& [name, decl] : classes) {
        (void)decl;
        if (is_subclass_of(name, c)) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string ProgramAST::field_owner(const std::string& cls, const std::string& member) const {
    std::string cur = cls;
    std::set<std::string> seen;
    while (!cur.empty() && seen.insert(cur).second) {
        const ClassDecl* c = find_class(cur);
        if (!c) return {};
        for (const auto& f : c->fields)
            if (f.name == member) return cur;
        cur = c->base;
    }
    return {};
}

const FunctionDecl* ProgramAST::lookup_method(const std::string& cls,
                                              const std::string& name) const {
    std::string cur = cls;
    std::set<std::string> seen;
    while (!cur.empty() && seen.insert(cur).second) {
        const ClassDecl* c = find_class(cur);
        if (!c) return nullptr;
        for (const auto& m : c->methods)
            if (!m->is_ctor && m->name == name) return m.get();
        cur = c->base;
    }
    return nullptr;
}

}  // namespace moa
