#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace decorr {

struct SourceLoc {
    int line = 0; // 1-based; 0 = unknown
    int col = 0;
};

struct Diagnostic {
    enum class Kind {
        SyntaxError,
        UndeclaredVariable,
        DuplicateDeclaration,
        UnknownLabel,
        DuplicateLabel,
        TypeMismatch,
        UnsupportedFloat,
        BadLiteral,
    };
    Kind kind = Kind::SyntaxError;
    std::string message;
    SourceLoc loc{};
};

const char* to_string(Diagnostic::Kind kind);

// "file:line:col: message"
std::string format_diagnostic(const std::string& file, const Diagnostic& d);

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(std::string msg, SourceLoc where)
        : Error(std::move(msg)), loc(where) {}
    SourceLoc loc;
};

// Thrown by parse_program when validation diagnostics remain.
struct ValidationError : Error {
    ValidationError(std::string msg, std::vector<Diagnostic> ds)
        : Error(std::move(msg)), diagnostics(std::move(ds)) {}
    std::vector<Diagnostic> diagnostics;
};

struct CompileError : Error {
    using Error::Error;
};

// Bad obfuscated IDs, out-of-range accesses, foreign residues.
struct MemoryError : Error {
    using Error::Error;
};

// Runtime faults in the evaluator (division by zero, missing label).
struct ExecError : Error {
    using Error::Error;
};

struct FuelExhausted : Error {
    using Error::Error;
};

} // namespace decorr
