#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moa/diag.hpp"

namespace moa {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind {
    Void,
    I8,
    I32,
    U8,
    U32,
    Bool,
    Var,   // tagged dynamic value (Int | Bool | Ref)
    Tag,   // result of tag_of(); compared against Int/Bool/Ref constants
    Buf,   // opaque buffer handle from alloc()
    ClassPtr,
    FnRef,
};

struct FnSig;

struct Type {
    TypeKind kind = TypeKind::Void;
    std::string class_name;          // ClassPtr
    std::shared_ptr<FnSig> fn_sig;   // FnRef

    bool is_int() const {
        return kind == TypeKind::I8 || kind == TypeKind::I32 || kind == TypeKind::U8 ||
               kind == TypeKind::U32;
    }
    bool is_signed_int() const { return kind == TypeKind::I8 || kind == TypeKind::I32; }
    bool is_unsigned_int() const { return kind == TypeKind::U8 || kind == TypeKind::U32; }
    int bit_width() const {
        switch (kind) {
            case TypeKind::I8:
            case TypeKind::U8: return 8;
            case TypeKind::I32:
            case TypeKind::U32: return 32;
            default: return 0;
        }
    }
    std::string str() const;

    static Type void_() { return {}; }
    static Type i8() { return {TypeKind::I8, {}, nullptr}; }
    static Type i32() { return {TypeKind::I32, {}, nullptr}; }
    static Type u8() { return {TypeKind::U8, {}, nullptr}; }
    static Type u32() { return {TypeKind::U32, {}, nullptr}; }
    static Type boolean() { return {TypeKind::Bool, {}, nullptr}; }
    static Type var() { return {TypeKind::Var, {}, nullptr}; }
    static Type tag() { return {TypeKind::Tag, {}, nullptr}; }
    static Type buf() { return {TypeKind::Buf, {}, nullptr}; }
    static Type class_ptr(std::string name) { return {TypeKind::ClassPtr, std::move(name), nullptr}; }
    static Type fn_ref(std::shared_ptr<FnSig> sig) { return {TypeKind::FnRef, {}, std::move(sig)}; }
};

struct FnSig {
    std::vector<Type> params;
    Type ret;
};

bool operator==(const Type& a, const Type& b);
inline bool operator!=(const Type& a, const Type& b) { return !(a == b); }

// Runtime tag of a `var` value.
enum class VarTag : uint8_t { Int = 0, Bool = 1, Ref = 2 };

inline const char* var_tag_name(VarTag t) {
    switch (t) {
        case VarTag::Int: return "Int";
        case VarTag::Bool: return "Bool";
        case VarTag::Ref: return "Ref";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Declaration ids: stable qualified names ("foo", "foo::x", "foo::isZero").
// ---------------------------------------------------------------------------

using DeclID = std::string;

inline DeclID make_member_id(const std::string& cls, const std::string& member) {
    return cls + "::" + member;
}
inline std::string declid_owner(const DeclID& id) {
    auto pos = id.rfind("::");
    return pos == std::string::npos ? std::string() : id.substr(0, pos);
}
inline std::string declid_leaf(const DeclID& id) {
    auto pos = id.rfind("::");
    return pos == std::string::npos ? id : id.substr(pos + 2);
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind {
    IntLit,
    BoolLit,
    This,
    LocalRef,     // local variable or parameter, after resolution
    FnConst,      // &f or a bare function name in call position
    TagConst,     // Int / Bool / Ref
    FieldAccess,  // obj.f (obj may be implicit this; `base` null means this)
    Unary,        // ! -
    Binary,       // + - * / == != < <= > >=
    Call,         // direct call, method call, intrinsic call or indirect call
    New,          // new C(args)
    Downcast,     // downcast<C>(e)
    Cast,         // cast<T>(e), explicit
    ImplicitConv, // inserted by sema: widening / signed->unsigned / boxing / truthiness / upcast
};

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge };

// How a Call dispatches, filled in by sema.
enum class CallKind {
    Free,      // direct call of a free function
    Method,    // non-virtual method: static target
    Virtual,   // virtual method: vtable slot dispatch
    Ctor,      // only as part of New handling, not user-visible
    Intrinsic, // extern_input / alloc / read_buf / tag_of / as_int / as_int8 / as_bool
    Indirect,  // call through a fn-ref value
};

enum class ConvKind {
    WidenSigned,    // i8 -> i32 (sign extension)
    WidenUnsigned,  // u8 -> u32 / u8 -> i32 (zero extension)
    SignedToUnsigned, // equal width: i8->u8, i32->u32
    IntTruth,       // int used as condition: != 0
    BoxVar,         // int/bool/class-ptr -> var
    Upcast,         // D* -> B*
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    ExprKind kind;
    SourceLoc loc;
    Type type;  // filled by sema

    // IntLit
    int64_t ival = 0;
    // BoolLit
    bool bval = false;
    // LocalRef / FieldAccess member name / Call callee name / New class /
    // Downcast-Cast target in `name` or `cast_type`.
    std::string name;
    // FnConst / resolved direct-call target / resolved field DeclID.
    DeclID decl;
    // TagConst
    VarTag tag = VarTag::Int;
    // FieldAccess base (null => this.<name>), Unary/ImplicitConv operand,
    // Downcast/Cast operand, Call receiver or callee expression.
    ExprPtr base;
    // Binary
    ExprPtr rhs;
    UnaryOp un_op = UnaryOp::Not;
    BinaryOp bin_op = BinaryOp::Add;
    // Call
    CallKind call_kind = CallKind::Free;
    std::vector<ExprPtr> args;
    int vslot = -1;                 // Virtual: vtable slot
    std::string static_class;      // Virtual: static receiver class; Method: owner
    // Cast target type (also used for Downcast as class_ptr type)
    Type cast_type;
    // ImplicitConv
    ConvKind conv = ConvKind::WidenSigned;

    explicit Expr(ExprKind k, SourceLoc l) : kind(k), loc(std::move(l)) {}
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind { Block, If, While, Return, VarDecl, Assign, ExprStmt };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
    StmtKind kind;
    SourceLoc loc;

    std::vector<StmtPtr> body;  // Block
    ExprPtr cond;               // If / While
    StmtPtr then_stmt;          // If / While body
    StmtPtr else_stmt;          // If
    ExprPtr value;              // Return / VarDecl init / Assign rhs / ExprStmt
    ExprPtr target;             // Assign lhs
    std::string name;           // VarDecl
    Type decl_type;             // VarDecl

    explicit Stmt(StmtKind k, SourceLoc l) : kind(k), loc(std::move(l)) {}
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct Param {
    std::string name;
    Type type;
    bool by_ref = false;
    SourceLoc loc;
};

struct FieldDecl {
    std::string name;
    Type type;
    SourceLoc loc;
    DeclID id;  // "Class::field"
};

// Free function, method or constructor.
struct FunctionDecl {
    DeclID id;                 // "f" or "Class::m"; ctor is "Class::Class"
    std::string name;          // unqualified
    std::string owner_class;   // empty for free functions
    bool is_ctor = false;
    bool is_virtual = false;   // declared virtual or overriding a virtual
    std::vector<Param> params;
    Type ret;
    StmtPtr body;
    SourceLoc loc;
    SourceLoc end_loc;         // closing brace; used for "within extent" matching
    std::string unit;          // unit name this function was declared in
    int vslot = -1;            // vtable slot when virtual
};

struct ClassDecl {
    std::string name;
    std::string base;  // empty when none
    std::vector<FieldDecl> fields;
    std::vector<std::unique_ptr<FunctionDecl>> methods;  // ctor included
    FunctionDecl* ctor = nullptr;                        // at most one; may be null
    SourceLoc loc;
    std::string unit;
};

struct ImportDecl {
    std::string name;
    SourceLoc loc;
};

struct TranslationUnit {
    std::string name;  // unit name: source path as given, minus ".mo", basename’d by caller policy
    std::string path;  // as given to parse_unit (report-facing)
    std::vector<ImportDecl> imports;
    std::vector<std::unique_ptr<ClassDecl>> classes;
    std::vector<std::unique_ptr<FunctionDecl>> functions;  // free functions
    bool checked = false;  // sema completed (true for import-free units after parse_unit)
};

using UnitPtr = std::unique_ptr<TranslationUnit>;

// Whole program after resolve_program: units plus global symbol tables.
struct ProgramAST {
    std::vector<UnitPtr> units;
    std::map<std::string, ClassDecl*> classes;        // name -> decl
    std::map<DeclID, FunctionDecl*> functions;        // every fn incl. methods/ctors
    std::map<DeclID, const FieldDecl*> fields;        // "C::f" -> decl

    const ClassDecl* find_class(const std::string& n) const {
        auto it = classes.find(n);
        return it == classes.end() ? nullptr : it->second;
    }
    const FunctionDecl* find_function(const DeclID& id) const {
        auto it = functions.find(id);
        return it == functions.end() ? nullptr : it->second;
    }

    // True when `derived` equals `base` or transitively extends it.
    bool is_subclass_of(const std::string& derived, const std::string& base) const;
    // All classes D with is_subclass_of(D, c), c included. Sorted by name.
    std::vector<std::string> subclass_cone(const std::string& c) const;
    // Walks up the hierarchy to find the class declaring `member`; empty if none.
    std::string field_owner(const std::string& cls, const std::string& member) const;
    // Method lookup walking up the hierarchy; null if absent.
    const FunctionDecl* lookup_method(const std::string& cls, const std::string& name) const;
};

}  // namespace moa
