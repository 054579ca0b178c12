#include "decorr/tee_runtime.hpp"

#include <cassert>

#include "decorr/errors.hpp"

namespace decorr {

std::vector<uint16_t> page_permutation(uint64_t perm_seed, uint32_t counter, uint32_t page,
                                       uint32_t page_size) {
    std::vector<uint16_t> perm(page_size);
    for (uint32_t i = 0; i < page_size; ++i) perm[i] = static_cast<uint16_t>(i);
    uint64_t seed = mix_seed(perm_seed, (static_cast<uint64_t>(counter) << 20) | page);
    Rng rng(seed);
    rng.shuffle(perm);
    return perm;
}

TeeRuntime::TeeRuntime(KeyMaterial key, std::vector<uint8_t> clear_image, TeeOptions opts)
    : key_(key), opts_(opts), jitter_rng_(mix_seed(key.perm_seed, 0x717e5u)) {
    key_.check();
    if (clear_image.size() != key_.flat_size)
        throw MemoryError("initial image size does not match the key material");
    page_size_ = 1u << key_.page_bits;
    pages_ = static_cast<uint32_t>((clear_image.size() + page_size_ - 1) / page_size_);
    if (pages_ == 0) pages_ = 1;
    counter_mask_ = key_.counter_bits >= 32 ? ~0u : ((1u << key_.counter_bits) - 1);
    period_ = opts_.shuffle_period_override != UINT64_MAX ? opts_.shuffle_period_override
                                                          : key_.shuffle_period;
    counters_.assign(pages_, 0);
    perms_.resize(pages_);
    for (uint32_t p = 0; p < pages_; ++p) perms_[p] = permutation(0, p);

    // Load: scatter the clear image through the counter-0 mapping so physical
    // state is already permuted before the first untrusted observation.
    mem_.assign(static_cast<size_t>(pages_) * page_size_, 0);
    clear_image.resize(mem_.size(), 0);
    for (uint32_t p = 0; p < pages_; ++p)
        for (uint32_t i = 0; i < page_size_; ++i)
            mem_[p * page_size_ + perms_[p][i]] = clear_image[p * page_size_ + i];

    redraw_threshold();
}

void TeeRuntime::redraw_threshold() {
    if (period_ == 0) {
        next_threshold_ = 0;
        return;
    }
    uint64_t jitter = period_ / 4;
    if (jitter == 0) {
        next_threshold_ = period_;
        return;
    }
    next_threshold_ = jitter_rng_.between(period_ - jitter, period_ + jitter);
}

std::vector<uint16_t> TeeRuntime::permutation(uint32_t counter, uint32_t page) const {
    if (opts_.identity_permutation) {
        std::vector<uint16_t> id(page_size_);
        for (uint32_t i = 0; i < page_size_; ++i) id[i] = static_cast<uint16_t>(i);
        return id;
    }
    return page_permutation(key_.perm_seed, counter, page, page_size_);
}

uint32_t TeeRuntime::clear_of(uint64_t r) const {
    uint64_t clear = modular_clear_id(key_.sk, r);
    if (clear >= key_.flat_size)
        throw MemoryError("foreign or corrupted obfuscated id " + std::to_string(r) +
                          " (residue " + std::to_string(clear) + ")");
    return static_cast<uint32_t>(clear);
}

uint32_t TeeRuntime::h_map(uint32_t page, uint32_t local) {
    if (opts_.log_h_calls) h_log_.push_back(HCall{counters_[page], page, local});
    return perms_[page][local];
}

void TeeRuntime::shuffle_page(uint32_t page, uint32_t old_counter, uint32_t new_counter) {
    std::vector<uint16_t> stale;
    const std::vector<uint16_t>& old_perm = old_counter == counters_[page]
                                                ? perms_[page]
                                                : (stale = permutation(old_counter, page));
    std::vector<uint16_t> new_perm = permutation(new_counter, page);
    std::vector<uint8_t> scratch(page_size_);
    uint8_t* bytes = mem_.data() + static_cast<size_t>(page) * page_size_;
    for (uint32_t x = 0; x < page_size_; ++x) scratch[new_perm[x]] = bytes[old_perm[x]];
    std::copy(scratch.begin(), scratch.end(), bytes);
    counters_[page] = new_counter;
    perms_[page] = std::move(new_perm);
}

void TeeRuntime::shuffle_all() {
    for (uint32_t p = 0; p < pages_; ++p)
        shuffle_page(p, counters_[p], (counters_[p] + 1) & counter_mask_);
    ++stats_.shuffles;
    stats_.accesses_since_shuffle = 0;
}

TeeRuntime::Resolution TeeRuntime::resolve(uint64_t r, uint32_t width) {
    Resolution res;
    if (shuffle_due(stats_, next_threshold_)) {
        shuffle_all();
        redraw_threshold();
        ++res.shuffles;
    }
    uint32_t clear = clear_of(r);
    if (clear + width > key_.flat_size)
        throw MemoryError("data item at clear id " + std::to_string(clear) +
                          " extends past the data section");
    res.phys.reserve(width);
    for (uint32_t j = 0; j < width; ++j) {
        uint32_t byte = clear + j;
        uint32_t page = byte >> key_.page_bits;
        uint32_t local = byte & (page_size_ - 1);
        res.phys.push_back(page * page_size_ + h_map(page, local));
    }
    ++stats_.total_accesses;
    ++stats_.accesses_since_shuffle;
    return res;
}

} // namespace decorr
