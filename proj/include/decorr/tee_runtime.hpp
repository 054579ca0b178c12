#pragma once

#include <cstdint>
#include <vector>

#include "decorr/key_material.hpp"
#include "decorr/rng.hpp"

namespace decorr {

/// G: recover a clear ID from an obfuscated one. Pure arithmetic half; the
/// runtime additionally rejects residues at or beyond the data-section size.
inline uint64_t modular_clear_id(uint64_t sk, uint64_t r) {
    return r % sk;
}

/// H: the column of the pseudo-random permutation table selected by
/// (perm_seed, counter, page). A bijection on [0, page_size) for every counter.
std::vector<uint16_t> page_permutation(uint64_t perm_seed, uint32_t counter, uint32_t page,
                                       uint32_t page_size);

struct AccessStats {
    uint64_t total_accesses = 0;
    uint64_t accesses_since_shuffle = 0;
    uint64_t shuffles = 0;
};

// True when a shuffle is due ahead of the next access.
inline bool shuffle_due(const AccessStats& stats, uint64_t threshold) {
    return threshold != 0 && stats.accesses_since_shuffle + 1 >= threshold;
}

struct TeeOptions {
    bool identity_permutation = false; // test fixture: physical == clear
    bool log_h_calls = false;
    uint64_t shuffle_period_override = UINT64_MAX; // UINT64_MAX -> use key material
};

struct HCall {
    uint32_t counter;
    uint32_t page;
    uint32_t offset; // page-local clear offset
};

/// Simulated trusted boundary: holds the key material, translates obfuscated
/// IDs to physical byte addresses and periodically shuffles pages. The byte
/// plane itself is adversary-readable; only the translation state is secret.
class TeeRuntime {
public:
    TeeRuntime(KeyMaterial key, std::vector<uint8_t> clear_image, TeeOptions opts = {});

    struct Resolution {
        std::vector<uint32_t> phys; // one physical address per byte
        uint32_t shuffles = 0;      // shuffle events triggered by this request
    };

    /// Resolve an obfuscated ID to the physical addresses of its bytes.
    /// Applies the shuffle policy before translating; a request is never
    /// split across a shuffle.
    Resolution resolve(uint64_t r, uint32_t width);

    /// G plus validation against the data-section bound.
    uint32_t clear_of(uint64_t r) const;

    std::vector<uint8_t>& memory() { return mem_; }
    const std::vector<uint8_t>& memory() const { return mem_; }

    /// Shuffle every page to its next counter (trusted-side operation).
    void shuffle_all();

    /// Relocate one page so the byte at H(old_counter, x) moves to
    /// H(new_counter, x); the page content is unchanged as a multiset.
    void shuffle_page(uint32_t page, uint32_t old_counter, uint32_t new_counter);

    uint32_t page_count() const { return pages_; }
    uint32_t page_size() const { return page_size_; }
    uint32_t page_counter(uint32_t page) const { return counters_.at(page); }
    const AccessStats& stats() const { return stats_; }
    uint64_t shuffle_period() const { return period_; }
    const KeyMaterial& key() const { return key_; }

    const std::vector<HCall>& h_log() const { return h_log_; }
    void clear_h_log() { h_log_.clear(); }

private:
    uint32_t h_map(uint32_t page, uint32_t local);
    std::vector<uint16_t> permutation(uint32_t counter, uint32_t page) const;
    void redraw_threshold();

    KeyMaterial key_;
    TeeOptions opts_;
    uint32_t pages_ = 0;
    uint32_t page_size_ = 0;
    uint32_t counter_mask_ = 0;
    uint64_t period_ = 0;
    uint64_t next_threshold_ = 0;
    std::vector<uint8_t> mem_;
    std::vector<uint32_t> counters_;
    std::vector<std::vector<uint16_t>> perms_; // cached current column per page
    AccessStats stats_;
    Rng jitter_rng_;
    std::vector<HCall> h_log_;
};

} // namespace decorr
