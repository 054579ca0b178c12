#include "decorr/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "decorr/rng.hpp"

namespace decorr {

Fraction baseline_pair_prob_exact(const std::vector<uint64_t>& sizes) {
    if (sizes.empty()) throw Error("baseline_pair_prob: no programs");
    uint64_t sum = 0, sum_sq = 0;
    for (uint64_t s : sizes) {
        sum += s;
        sum_sq += s * s;
    }
    if (sum < 2) throw Error("baseline_pair_prob: fewer than two statements in total");
    return Fraction{sum_sq - sum, sum * sum - sum};
}

double baseline_pair_prob(const std::vector<uint64_t>& sizes) {
    return baseline_pair_prob_exact(sizes).value();
}

double reconstruct_prob(const std::vector<uint64_t>& sizes, size_t target_index) {
    if (target_index >= sizes.size()) throw Error("reconstruct_prob: bad target index");
    uint64_t total = 0;
    for (uint64_t s : sizes) total += s;
    uint64_t m = sizes[target_index];
    if (m == 0) return 1.0; // an empty target is trivially reconstructed
    // falling factorial S * (S-1) * ... * (S-m+1), exact while it fits
    uint64_t ff = 1;
    bool exact = true;
    for (uint64_t i = 0; i < m; ++i) {
        uint64_t factor = total - i;
        if (exact && ff <= UINT64_MAX / factor) {
            ff *= factor;
        } else {
            exact = false;
            break;
        }
    }
    if (exact) return 1.0 / static_cast<double>(ff);
    double log_p = 0;
    for (uint64_t i = 0; i < m; ++i) log_p -= std::log(static_cast<double>(total - i));
    return std::exp(log_p);
}

DistributionProfile profile_from_histograms(const std::vector<std::map<std::string, int>>& h) {
    DistributionProfile profile;
    for (const auto& counts : h) {
        double total = 0;
        for (const auto& [op, c] : counts) total += c;
        std::map<std::string, double> d;
        for (const auto& [op, c] : counts)
            if (c > 0) d[op] = c / total;
        profile.push_back(std::move(d));
    }
    return profile;
}

void check_profile(const DistributionProfile& profile) {
    for (const auto& d : profile) {
        double sum = 0;
        for (const auto& [op, p] : d) sum += p;
        if (std::abs(sum - 1.0) > 1e-12)
            throw Error("distribution profile does not sum to 1");
    }
}

GuessResult educated_guess_win(const std::vector<uint64_t>& sizes,
                               const DistributionProfile& profile, const std::string& opcode) {
    if (sizes.size() != profile.size() || sizes.empty())
        throw Error("educated_guess_win: sizes and profile disagree");
    check_profile(profile);
    auto weight = [&](size_t i) {
        auto it = profile[i].find(opcode);
        double d = it == profile[i].end() ? 0.0 : it->second;
        return static_cast<double>(sizes[i]) * d;
    };
    double denom = 0;
    size_t target = 0;
    double best = -1;
    for (size_t i = 0; i < sizes.size(); ++i) {
        double w = weight(i);
        denom += w;
        if (w > best) {
            best = w;
            target = i;
        }
    }
    if (denom <= 0) throw Error("educated_guess_win: opcode '" + opcode + "' emitted by no program");
    GuessResult g;
    g.target = target;
    g.win = best / denom;
    g.advantage = g.win - 1.0 / static_cast<double>(sizes.size());
    return g;
}

double monte_carlo_pair_prob(const std::vector<uint64_t>& sizes, uint64_t trials, uint64_t seed) {
    if (trials == 0) throw Error("monte_carlo_pair_prob: trials must be positive");
    std::vector<uint32_t> labels;
    for (size_t i = 0; i < sizes.size(); ++i)
        labels.insert(labels.end(), sizes[i], static_cast<uint32_t>(i));
    if (labels.size() < 2) throw Error("monte_carlo_pair_prob: fewer than two statements");
    Rng rng(mix_seed(seed, 0xabacu));
    uint64_t hits = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        uint64_t a = rng.below(labels.size());
        uint64_t b = rng.below(labels.size() - 1);
        if (b >= a) ++b; // second draw skips the first position
        if (labels[a] == labels[b]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

double baseline_from_provenance(const ProvenanceMap& truth) {
    std::map<std::string, uint64_t> counts;
    uint64_t total = truth.stmt_origin.size();
    for (const auto& origin : truth.stmt_origin)
        if (origin != ProvenanceMap::kJunk) ++counts[origin];
    if (total < 2) return 0;
    double num = 0;
    for (const auto& [name, c] : counts) num += static_cast<double>(c) * (c - 1);
    return num / (static_cast<double>(total) * (total - 1));
}

nlohmann::json AttackReport::to_json() const {
    return {{"correlator", correlator}, {"accuracy", accuracy},
            {"baseline", baseline},     {"advantage", advantage},
            {"guessed_pairs", guessed_pairs}, {"trials", trials},
            {"vacuous", vacuous},       {"guessed_modulus", guessed_modulus}};
}

namespace {

using StmtPair = std::pair<uint32_t, uint32_t>;

AttackReport score_pairs(const std::set<StmtPair>& guesses, const ProvenanceMap& truth,
                         std::string correlator) {
    AttackReport rep;
    rep.correlator = std::move(correlator);
    rep.baseline = baseline_from_provenance(truth);
    rep.trials = truth.stmt_origin.size();
    rep.guessed_pairs = guesses.size();
    if (guesses.empty()) {
        rep.vacuous = true;
        return rep;
    }
    uint64_t correct = 0;
    for (const auto& [a, b] : guesses) {
        const std::string& oa = truth.stmt_origin.at(a);
        const std::string& ob = truth.stmt_origin.at(b);
        if (oa == ob && oa != ProvenanceMap::kJunk) ++correct;
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(guesses.size());
    rep.advantage = rep.accuracy - rep.baseline;
    return rep;
}

void pairs_of_group(const std::set<uint32_t>& group, std::set<StmtPair>& out) {
    for (auto it = group.begin(); it != group.end(); ++it)
        for (auto jt = std::next(it); jt != group.end(); ++jt)
            out.insert({*it, *jt});
}

AttackReport physical_correlator(const std::vector<TraceStep>& trace,
                                 const ProvenanceMap& truth) {
    // statements that ever touch the same physical byte are guessed correlated
    std::unordered_map<uint32_t, std::set<uint32_t>> by_addr;
    for (const auto& step : trace)
        for (uint32_t addr : step.phys) by_addr[addr].insert(step.stmt);
    std::set<StmtPair> guesses;
    for (const auto& [addr, stmts] : by_addr) pairs_of_group(stmts, guesses);
    return score_pairs(guesses, truth, "physical-co-access");
}

std::vector<std::vector<uint64_t>> statement_ids(const ObfProgram& program) {
    std::vector<std::vector<uint64_t>> ids(program.statements.size());
    for (size_t i = 0; i < program.statements.size(); ++i) {
        ObfProgram one;
        one.statements.push_back(program.statements[i]);
        ids[i] = one.all_ids();
    }
    return ids;
}

AttackReport residue_correlator(const ObfProgram& program, const ProvenanceMap& truth,
                                double gap_threshold) {
    std::vector<uint64_t> all = program.all_ids();
    AttackReport vac;
    vac.correlator = "residue-clustering";
    vac.baseline = baseline_from_provenance(truth);
    vac.trials = truth.stmt_origin.size();
    if (all.empty()) {
        vac.vacuous = true;
        return vac;
    }
    uint64_t min_id = *std::min_element(all.begin(), all.end());
    // Candidate moduli: the key never exceeds the smallest issued id. Pick the
    // candidate whose residues leave the widest top gap (the key compresses
    // all residues below t << m), tie-broken by the most id collisions.
    uint64_t best_m = 0;
    double best_pairs = -1;
    for (uint64_t m = 2; m <= min_id; ++m) {
        uint64_t max_res = 0;
        std::unordered_map<uint64_t, uint64_t> counts;
        for (uint64_t id : all) {
            uint64_t res = id % m;
            max_res = std::max(max_res, res);
            ++counts[res];
        }
        double gap = static_cast<double>(m - 1 - max_res) / static_cast<double>(m);
        if (gap < gap_threshold) continue;
        double pairs = 0;
        for (const auto& [res, c] : counts) pairs += 0.5 * c * (c - 1);
        if (pairs > best_pairs) {
            best_pairs = pairs;
            best_m = m;
        }
    }
    if (best_m == 0) {
        vac.vacuous = true;
        return vac;
    }
    auto ids = statement_ids(program);
    std::unordered_map<uint64_t, std::set<uint32_t>> by_residue;
    for (size_t i = 0; i < ids.size(); ++i)
        for (uint64_t id : ids[i]) by_residue[id % best_m].insert(static_cast<uint32_t>(i));
    std::set<StmtPair> guesses;
    for (const auto& [res, stmts] : by_residue) pairs_of_group(stmts, guesses);
    AttackReport rep = score_pairs(guesses, truth, "residue-clustering");
    rep.guessed_modulus = best_m;
    return rep;
}

} // namespace

std::vector<AttackReport> trace_attack(const std::vector<TraceStep>& trace,
                                       const ObfProgram& program, const ProvenanceMap& truth,
                                       const AttackConfig& cfg) {
    std::vector<AttackReport> reports;
    if (cfg.physical) reports.push_back(physical_correlator(trace, truth));
    if (cfg.residue) reports.push_back(residue_correlator(program, truth, cfg.gap_threshold));
    return reports;
}

} // namespace decorr
