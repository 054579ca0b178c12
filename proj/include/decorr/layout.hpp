#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "decorr/ast.hpp"

namespace decorr {

enum class EntryKind { Var, Const, PredState };

std::string_view to_string(EntryKind k);

struct LayoutEntry {
    std::string label;
    uint32_t clear_id = 0; // first byte offset in the flat data section
    uint32_t width = 0;    // ints 4 bytes, bools 1 byte
    EntryKind kind = EntryKind::Var;
    int64_t init = 0;      // initial value, little-endian in the image
};

struct LayoutConfig {
    uint64_t seed = 0;                  // placement order randomization
    uint64_t max_data_size = 1u << 20;  // address-space bound
};

struct FlatLayout {
    std::vector<LayoutEntry> entries; // ascending clear_id, no gaps
    uint32_t total_size = 0;

    bool has(std::string_view label) const;
    const LayoutEntry& entry_of(std::string_view label) const; // throws MemoryError
    uint32_t clear_id_of(std::string_view label) const;

    /// Clear-ordered initial bytes (length total_size).
    std::vector<uint8_t> initial_image() const;

    nlohmann::json to_json() const;
    static FlatLayout from_json(const nlohmann::json& j);
};

// Entry label scheme. Labels are trusted-side names only; they never appear in
// untrusted artifacts.
std::string var_label(const std::string& prog, const std::string& name);
std::string const_int_label(int64_t value);
std::string const_bool_label(bool value);
std::string pred_value_label(const std::string& prog, const PredRef& pred);
std::string pred_last_label(const std::string& prog, const PredRef& pred);

/// Place every declared variable, literal constant, per-program constant
/// predicate slot, junk slot and predicate last-line word of the given
/// programs. Placement order is randomized by the seed.
FlatLayout build_layout(const std::vector<Program>& programs, const LayoutConfig& cfg);

} // namespace decorr
