#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

namespace decorr {

struct BenchConfig {
    uint32_t p1_iterations = 4000;   // average of a 4000-number list
    uint32_t p2_iterations = 10000;  // 10000-element dot product
    int repetitions = 10;
    bool uniformize = true;          // pass --no-uniformize to match solo conditions
    uint64_t seed = 7;
    uint64_t shuffle_period = 0;     // 0 -> number of merged programs, same for solo runs
    uint64_t fuel = 100'000'000;
};

struct BenchReport {
    double p1_solo = 0;   // seconds, solo program through the same pipeline
    double p2_solo = 0;
    double solo_sum = 0;
    double merged = 0;    // merged obfuscated runtime
    double overhead = 0;  // merged / solo_sum - 1
    int repetitions = 0;

    nlohmann::json to_json() const;
};

/// Reproduces the overhead experiment: solo runs interpret each program alone
/// through the evaluator + trusted runtime; the merged run interprets the
/// combined obfuscated program. All runs share the shuffle period. Timings are
/// median-of-means over the repetitions.
BenchReport run_bench(const BenchConfig& cfg);

} // namespace decorr
