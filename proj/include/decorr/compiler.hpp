#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "decorr/ast.hpp"
#include "decorr/key_material.hpp"
#include "decorr/layout.hpp"
#include "decorr/obf_program.hpp"
#include "decorr/rng.hpp"

namespace decorr {

struct CompileConfig {
    uint64_t seed = 1;        // layout order, sk draw, interleaving, ID mining
    uint64_t junk_seed = 1;
    uint64_t perm_seed = 1;
    bool uniformize = true;
    double junk_ratio = 16.0; // size cap: |O(P)| <= ratio * sum of input sizes
    int junk_programs = 0;    // whole decoy programs to add before uniformizing
    uint32_t alpha = 2;
    uint32_t beta = 5;
    uint64_t id_bound = 1'000'000;
    uint32_t page_bits = 8;
    uint32_t counter_bits = 16;
    uint64_t shuffle_period = 0; // 0 -> number of input programs
    uint64_t max_data_size = 1u << 20;
};

struct CompileResult {
    ObfProgram program;
    KeyMaterial key;
    FlatLayout layout;
    ProvenanceMap provenance;
    std::vector<uint8_t> image; // clear-ordered initial data section
};

// Opcode-kind histogram of a program (adversary-visible instruction classes).
std::map<std::string, int> opcode_histogram(const Program& p);

// Union of kinds used across the programs, sorted.
std::vector<std::string> default_alphabet(const std::vector<Program>& programs);

/// Pad every program with junk statements until each opcode kind of the
/// alphabet occurs equally often in each program; all programs end up with the
/// same statement count. Junk writes only dedicated junk variables; original
/// statements keep their relative order.
std::vector<Program> uniformize(const std::vector<Program>& programs,
                                const std::vector<std::string>& alphabet,
                                uint64_t junk_seed);

struct MergedStatement {
    size_t program = 0; // index into the input list
    Statement stmt;
};

struct Interleaved {
    std::vector<MergedStatement> statements;
    std::vector<std::string> origin; // program name, or "JUNK" for junk statements
};

/// Weighted random interleaving: each step takes the front statement of a
/// program drawn with probability proportional to its remaining size.
Interleaved interleave(const std::vector<Program>& programs, uint64_t seed);

/// F: mines fresh obfuscated IDs congruent to a clear ID modulo sk. Every
/// occurrence of a label receives a distinct ID; outputs stay in (sk,
/// id_bound) so no listing token is a clear ID or the key itself.
class IdMiner {
public:
    IdMiner(uint64_t sk, uint64_t id_bound, uint64_t seed);

    uint64_t mine(uint32_t clear_id); // throws CompileError when the class is exhausted

    const std::unordered_set<uint64_t>& used() const { return used_; }

private:
    uint64_t capacity_of(uint32_t clear_id) const;

    uint64_t sk_;
    uint64_t id_bound_;
    Rng rng_;
    std::unordered_set<uint64_t> used_;
    std::map<uint32_t, uint64_t> class_used_;
};

/// A decoy program made entirely of junk statements.
Program make_junk_program(const std::string& name, size_t size,
                          const std::vector<std::string>& alphabet, uint64_t seed);

/// Full pipeline: uniformize -> layout -> interleave -> ID obfuscation.
CompileResult compile(const std::vector<Program>& programs, const CompileConfig& config);

} // namespace decorr
