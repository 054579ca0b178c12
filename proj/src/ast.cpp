#include "decorr/ast.hpp"

namespace decorr {

std::string_view to_string(Type t) {
    switch (t) {
    case Type::Bool: return "bool";
    case Type::Int: return "int";
    case Type::Float: return "float";
    }
    return "?";
}

std::string_view to_string(UnOp op) {
    switch (op) {
    case UnOp::Neg: return "neg";
    case UnOp::Not: return "not";
    }
    return "?";
}

std::string_view to_string(BinOp op) {
    switch (op) {
    case BinOp::Add: return "add";
    case BinOp::Sub: return "sub";
    case BinOp::Mul: return "mul";
    case BinOp::Div: return "div";
    case BinOp::Mod: return "mod";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Lt: return "lt";
    case BinOp::Le: return "le";
    case BinOp::Gt: return "gt";
    case BinOp::Ge: return "ge";
    case BinOp::Eq: return "eq";
    case BinOp::Ne: return "ne";
    }
    return "?";
}

Expr Expr::int_lit(int64_t v) {
    Expr e;
    e.kind = Kind::IntLit;
    e.int_value = v;
    return e;
}

Expr Expr::bool_lit(bool v) {
    Expr e;
    e.kind = Kind::BoolLit;
    e.bool_value = v;
    return e;
}

Expr Expr::variable(std::string name) {
    Expr e;
    e.kind = Kind::Var;
    e.var = std::move(name);
    return e;
}

Expr Expr::unary(UnOp op, Expr a) {
    Expr e;
    e.kind = Kind::Unary;
    e.un = op;
    e.args.push_back(std::move(a));
    return e;
}

Expr Expr::binary(BinOp op, Expr a, Expr b) {
    Expr e;
    e.kind = Kind::Binary;
    e.bin = op;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
}

bool Expr::operator==(const Expr& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
    case Kind::IntLit: return int_value == o.int_value;
    case Kind::BoolLit: return bool_value == o.bool_value;
    case Kind::Var: return var == o.var;
    case Kind::Unary: return un == o.un && args == o.args;
    case Kind::Binary: return bin == o.bin && args == o.args;
    }
    return false;
}

const Declaration* Program::find_decl(std::string_view n) const {
    for (const auto& d : decls)
        if (d.name == n) return &d;
    return nullptr;
}

std::string opcode_kind(const Statement& s) {
    if (std::holds_alternative<PrintInst>(s.inst)) return "print";
    if (std::holds_alternative<GotoInst>(s.inst)) return "goto";
    const Expr* e = nullptr;
    if (const auto* a = std::get_if<AssignInst>(&s.inst))
        e = &a->value;
    else
        e = &std::get<EvalInst>(s.inst).value;
    switch (e->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
    case Expr::Kind::Var:
        return "mov";
    case Expr::Kind::Unary:
        return std::string(to_string(e->un));
    case Expr::Kind::Binary:
        return std::string(to_string(e->bin));
    }
    return "mov";
}

const char* to_string(Diagnostic::Kind kind) {
    switch (kind) {
    case Diagnostic::Kind::SyntaxError: return "syntax error";
    case Diagnostic::Kind::UndeclaredVariable: return "undeclared variable";
    case Diagnostic::Kind::DuplicateDeclaration: return "duplicate declaration";
    case Diagnostic::Kind::UnknownLabel: return "unknown label";
    case Diagnostic::Kind::DuplicateLabel: return "duplicate label";
    case Diagnostic::Kind::TypeMismatch: return "type mismatch";
    case Diagnostic::Kind::UnsupportedFloat: return "float unsupported";
    case Diagnostic::Kind::BadLiteral: return "bad literal";
    }
    return "error";
}

std::string format_diagnostic(const std::string& file, const Diagnostic& d) {
    return file + ":" + std::to_string(d.loc.line) + ":" + std::to_string(d.loc.col) +
           ": " + d.message;
}

} // namespace decorr
