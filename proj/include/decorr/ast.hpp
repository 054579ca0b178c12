#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "decorr/errors.hpp"

namespace decorr {

enum class Type { Bool, Int, Float };

std::string_view to_string(Type t);

struct Declaration {
    std::string name;
    Type type = Type::Int;
    SourceLoc loc{};
    bool operator==(const Declaration& o) const { return name == o.name && type == o.type; }
};

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Mod, And, Or, Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(UnOp op);
std::string_view to_string(BinOp op);

// Expression tree with value semantics (children live in `args`).
struct Expr {
    enum class Kind { IntLit, BoolLit, Var, Unary, Binary };
    Kind kind = Kind::IntLit;
    int64_t int_value = 0;
    bool bool_value = false;
    std::string var;
    UnOp un = UnOp::Neg;
    BinOp bin = BinOp::Add;
    std::vector<Expr> args;
    SourceLoc loc{};

    static Expr int_lit(int64_t v);
    static Expr bool_lit(bool v);
    static Expr variable(std::string name);
    static Expr unary(UnOp op, Expr a);
    static Expr binary(BinOp op, Expr a, Expr b);

    bool operator==(const Expr& o) const; // structural; ignores loc
};

// A predicate reference: the constant slots live per program, variables refer
// to declared booleans, junk slots are compiler-introduced resettable booleans.
struct PredRef {
    enum class Kind { TrueConst, FalseConst, Var, Junk };
    Kind kind = Kind::TrueConst;
    std::string var;     // Kind::Var
    int junk_slot = -1;  // Kind::Junk
    bool junk_init = true;

    static PredRef true_const() { return PredRef{}; }
    static PredRef false_const() { return PredRef{Kind::FalseConst, {}, -1, true}; }
    static PredRef variable(std::string name) { return PredRef{Kind::Var, std::move(name), -1, true}; }
    static PredRef junk(int slot, bool init) { return PredRef{Kind::Junk, {}, slot, init}; }

    bool operator==(const PredRef& o) const {
        return kind == o.kind && var == o.var && junk_slot == o.junk_slot && junk_init == o.junk_init;
    }
};

struct AssignInst {
    std::string target;
    Expr value;
    bool operator==(const AssignInst& o) const { return target == o.target && value == o.value; }
};

struct PrintInst {
    std::string format;
    Expr value;
    bool operator==(const PrintInst& o) const { return format == o.format && value == o.value; }
};

struct GotoInst {
    std::string target;
    std::vector<PredRef> resets_a; // first reset list
    std::vector<PredRef> resets_b; // second reset list
    bool operator==(const GotoInst& o) const {
        return target == o.target && resets_a == o.resets_a && resets_b == o.resets_b;
    }
};

struct EvalInst {
    Expr value;
    bool operator==(const EvalInst& o) const { return value == o.value; }
};

using Instruction = std::variant<AssignInst, PrintInst, GotoInst, EvalInst>;

struct Statement {
    std::optional<std::string> label;
    PredRef predicate;
    Instruction inst;
    bool is_junk = false;
    SourceLoc loc{};

    bool operator==(const Statement& o) const {
        return label == o.label && predicate == o.predicate && inst == o.inst && is_junk == o.is_junk;
    }
};

struct Program {
    std::string name;
    std::vector<Declaration> decls;
    std::vector<Statement> statements;

    const Declaration* find_decl(std::string_view name) const;

    bool operator==(const Program& o) const {
        return name == o.name && decls == o.decls && statements == o.statements;
    }
};

// Instruction class as an adversary would bin it: the root operator of the
// expression for assignments/evals ("mov" for plain copies), else the
// instruction keyword. Drives histograms and uniformization.
std::string opcode_kind(const Statement& s);

struct OutputRecord {
    std::string format;
    int64_t value = 0;
    bool operator==(const OutputRecord& o) const { return format == o.format && value == o.value; }
};

} // namespace decorr
