#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "decorr/evaluator.hpp"
#include "decorr/obf_program.hpp"

namespace decorr {

struct Fraction {
    uint64_t num = 0;
    uint64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Probability that two random distinct statements of the merged program share
/// a source program: (sum |P_k|^2 - sum |P_k|) / ((sum |P_k|)^2 - sum |P_k|).
Fraction baseline_pair_prob_exact(const std::vector<uint64_t>& sizes);
double baseline_pair_prob(const std::vector<uint64_t>& sizes);

/// Probability of reconstructing the target program when its statements are
/// sequentially dependent: (S - |P_t|)! / S!, evaluated as a falling-factorial
/// reciprocal (exact in double when the product fits 64 bits).
double reconstruct_prob(const std::vector<uint64_t>& sizes, size_t target_index);

// Per-program opcode distributions, each summing to 1.
using DistributionProfile = std::vector<std::map<std::string, double>>;

DistributionProfile profile_from_histograms(const std::vector<std::map<std::string, int>>& h);
void check_profile(const DistributionProfile& profile); // throws Error on bad sums

struct GuessResult {
    size_t target = 0;   // argmax |P_i| * D_i(s)
    double win = 0;      // |P_t| D_t(s) / sum |P_k| D_k(s)
    double advantage = 0; // win - 1/n
};

GuessResult educated_guess_win(const std::vector<uint64_t>& sizes,
                               const DistributionProfile& profile, const std::string& opcode);

/// Monte-Carlo oracle for baseline_pair_prob: samples pairs of distinct
/// positions from a labeled merged sequence.
double monte_carlo_pair_prob(const std::vector<uint64_t>& sizes, uint64_t trials, uint64_t seed);

// ---- empirical correlation attacks ---------------------------------------

struct AttackConfig {
    bool physical = true;       // cluster statements by co-accessed physical bytes
    bool residue = false;       // brute-force sk candidates and cluster by residue
    double gap_threshold = 0.25;
};

struct AttackReport {
    std::string correlator;
    double accuracy = 0;        // correct fraction of guessed same-program pairs
    double baseline = 0;        // random-guess reference from the merged composition
    double advantage = 0;
    uint64_t guessed_pairs = 0;
    uint64_t trials = 0;        // statements in scope
    bool vacuous = false;
    uint64_t guessed_modulus = 0; // residue correlator: recovered sk candidate

    nlohmann::json to_json() const;
};

/// Scores pair guesses from untrusted observables against trusted ground
/// truth. Pairs touching junk statements count as wrong guesses.
std::vector<AttackReport> trace_attack(const std::vector<TraceStep>& trace,
                                       const ObfProgram& program, const ProvenanceMap& truth,
                                       const AttackConfig& cfg = {});

/// Random-pair reference computed from the actual merged composition
/// (junk included in the universe, never "same program").
double baseline_from_provenance(const ProvenanceMap& truth);

} // namespace decorr
