#pragma once

#include <cstdint>
#include <vector>

#include "decorr/ast.hpp"

namespace decorr {

struct InterpResult {
    std::vector<OutputRecord> outputs;
    uint64_t steps = 0;
};

/// Direct AST interpreter for a single validated program. Shares the
/// predicate/goto semantics of the obfuscated evaluator but keeps variables in
/// named slots; serves as the reference for functionality checks.
InterpResult interpret(const Program& p, uint64_t fuel = 10'000'000);

} // namespace decorr
