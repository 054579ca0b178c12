#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "decorr/ast.hpp"

namespace decorr {

// Expression over obfuscated IDs. Leaves carry the reference width (bools are
// 1 byte, ints 4) so the untrusted evaluator knows how many bytes to resolve.
struct ObfExpr {
    enum class Kind { Ref, Unary, Binary };
    Kind kind = Kind::Ref;
    uint64_t ref = 0;
    uint8_t width = 4;
    UnOp un = UnOp::Neg;
    BinOp bin = BinOp::Add;
    std::vector<ObfExpr> args;

    static ObfExpr reference(uint64_t id, uint8_t w);
    static ObfExpr unary(UnOp op, ObfExpr a);
    static ObfExpr binary(BinOp op, ObfExpr a, ObfExpr b);
};

struct ObfAssign {
    uint64_t dst = 0;
    uint8_t width = 4;
    ObfExpr value;
};

struct ObfPrint {
    std::string format;
    ObfExpr value;
};

struct ObfGoto {
    std::string target;
    std::vector<uint64_t> resets_a; // obfuscated IDs of last-line words
    std::vector<uint64_t> resets_b;
};

struct ObfEval {
    ObfExpr value;
};

struct ObfStatement {
    std::optional<std::string> label;
    uint64_t pred_value = 0; // obfuscated ID of the predicate's value byte
    uint64_t pred_last = 0;  // obfuscated ID of the predicate's last-line word
    std::variant<ObfAssign, ObfPrint, ObfGoto, ObfEval> inst;
};

/// The merged, ID-obfuscated statement sequence. Read-only after compilation;
/// carries no clear IDs and no program-of-origin markers.
struct ObfProgram {
    static constexpr int format_version = 1;

    std::vector<ObfStatement> statements;
    uint32_t page_bits = 8;

    std::string opcode_of(size_t index) const; // adversary-visible instruction class
    std::vector<uint64_t> all_ids() const;
    std::map<std::string, size_t> label_index() const;

    std::string to_text() const;
    static ObfProgram from_text(std::string_view text);
};

// Trusted-side ground truth: statement origins and the id -> clear-id map.
struct ProvenanceMap {
    static constexpr const char* kJunk = "JUNK";

    std::vector<std::string> stmt_origin;       // per merged statement
    std::map<uint64_t, uint32_t> id_to_clear;   // every issued obfuscated ID

    nlohmann::json to_json() const;
    static ProvenanceMap from_json(const nlohmann::json& j);
};

} // namespace decorr
