#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "decorr/ast.hpp"

namespace decorr {

/// Parse a core-syntax program. Runs validation and throws ValidationError on
/// semantic problems (undeclared variables, duplicate declarations, unknown
/// goto labels); throws ParseError with line/column on syntax errors.
Program parse_program(std::string_view source, std::string name = "main");

/// Syntax only; semantic diagnostics left to validate().
Program parse_only(std::string_view source, std::string name = "main");

/// Empty result iff all Program invariants hold.
std::vector<Diagnostic> validate(const Program& p);

/// Canonical source text; parse_program(to_source(p)) is structurally equal to p.
std::string to_source(const Program& p);

// --- structured if/else extension ---------------------------------------

struct SStatement;

struct SIfChain {
    struct Branch {
        Expr cond;
        std::vector<SStatement> body;
    };
    std::vector<Branch> branches;     // if / else-if conditions, in order
    std::vector<SStatement> else_body;
};

struct SStatement {
    // Exactly one of these is active: a core statement (label already
    // attached), a bare instruction (no predicate written), or an if chain.
    enum class Kind { Core, Bare, If };
    Kind kind = Kind::Core;
    Statement core;
    Instruction bare;
    SIfChain chain;
    SourceLoc loc{};
};

struct SProgram {
    std::string name;
    std::vector<Declaration> decls;
    std::vector<SStatement> statements;
};

/// Parse the if/else extension. A pure core program parses unchanged.
SProgram parse_structured(std::string_view source, std::string name = "main");

/// Lower the structured form to pure predicated statements. Each branch body
/// runs under the conjunction of all enclosing conditions; conjunctions are
/// materialized into fresh boolean temporaries assigned eagerly before use.
Program desugar_if(const SProgram& sp);

} // namespace decorr
