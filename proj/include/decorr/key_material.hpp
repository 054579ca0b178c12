#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

namespace decorr {

// Trusted-side secrets and geometry. Never shipped next to the obfuscated
// program.
struct KeyMaterial {
    uint64_t sk = 0;            // secret modulus, drawn from [alpha*t, beta*t], > t
    uint32_t alpha = 2;
    uint32_t beta = 5;
    uint64_t id_bound = 1'000'000; // obfuscated IDs are mined below this bound
    uint64_t perm_seed = 1;        // key of the page permutation H
    uint32_t counter_bits = 16;    // k-bit wrapping page counters
    uint32_t page_bits = 8;        // pages of 2^page_bits bytes
    uint64_t shuffle_period = 1;   // mean accesses per shuffle; 0 = never
    uint32_t flat_size = 0;        // t, bytes of the flat data section

    void check() const; // throws CompileError on violated invariants

    nlohmann::json to_json() const;
    static KeyMaterial from_json(const nlohmann::json& j);
};

} // namespace decorr
