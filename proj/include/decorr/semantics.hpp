#pragma once

#include <cstdint>

#include "decorr/ast.hpp"
#include "decorr/errors.hpp"

namespace decorr {

// 32-bit two's-complement wrapping; booleans are 0/1.
inline int64_t wrap32(int64_t v) {
    return static_cast<int32_t>(static_cast<uint32_t>(v));
}

inline int64_t eval_unop(UnOp op, int64_t a) {
    switch (op) {
    case UnOp::Neg: return wrap32(-static_cast<uint32_t>(a));
    case UnOp::Not: return a == 0 ? 1 : 0;
    }
    return 0;
}

// Division truncates toward zero; division/modulo by zero is a runtime error.
inline int64_t eval_binop(BinOp op, int64_t a, int64_t b) {
    switch (op) {
    case BinOp::Add: return wrap32(static_cast<uint32_t>(a) + static_cast<uint32_t>(b));
    case BinOp::Sub: return wrap32(static_cast<uint32_t>(a) - static_cast<uint32_t>(b));
    case BinOp::Mul: return wrap32(static_cast<uint32_t>(a) * static_cast<uint32_t>(b));
    case BinOp::Div:
        if (b == 0) throw ExecError("division by zero");
        if (a == INT32_MIN && b == -1) return INT32_MIN; // wraps
        return wrap32(a / b);
    case BinOp::Mod:
        if (b == 0) throw ExecError("modulo by zero");
        if (a == INT32_MIN && b == -1) return 0;
        return wrap32(a % b);
    case BinOp::And: return (a != 0 && b != 0) ? 1 : 0;
    case BinOp::Or: return (a != 0 || b != 0) ? 1 : 0;
    case BinOp::Lt: return a < b ? 1 : 0;
    case BinOp::Le: return a <= b ? 1 : 0;
    case BinOp::Gt: return a > b ? 1 : 0;
    case BinOp::Ge: return a >= b ? 1 : 0;
    case BinOp::Eq: return a == b ? 1 : 0;
    case BinOp::Ne: return a != b ? 1 : 0;
    }
    return 0;
}

// Re-execution guard shared by the plain interpreter and the evaluator:
// proceed only when the current line is beyond the predicate's last recorded
// line. Gotos re-arm statements by resetting the record to -1.
inline bool pred_line_admits(int64_t current_line, int64_t last_line) {
    return current_line > last_line;
}

} // namespace decorr
