#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "decorr/rng.hpp"
#include "decorr/tee_runtime.hpp"

using namespace decorr;

namespace {

// sk=109 over a 40-byte data section: 109 in [2*40, 5*40]
KeyMaterial worked_key(uint64_t shuffle_period = 0) {
    KeyMaterial k;
    k.sk = 109;
    k.alpha = 2;
    k.beta = 5;
    k.id_bound = 1'000'000;
    k.perm_seed = 0xabcdef12;
    k.counter_bits = 16;
    k.page_bits = 8;
    k.shuffle_period = shuffle_period;
    k.flat_size = 40;
    return k;
}

std::vector<uint8_t> blank_image(uint32_t t) { return std::vector<uint8_t>(t, 0); }

void write_bytes(TeeRuntime& tee, const TeeRuntime::Resolution& r, uint64_t value) {
    for (size_t i = 0; i < r.phys.size(); ++i)
        tee.memory()[r.phys[i]] = static_cast<uint8_t>(value >> (8 * i));
}

uint64_t read_bytes(TeeRuntime& tee, const TeeRuntime::Resolution& r) {
    uint64_t v = 0;
    for (size_t i = 0; i < r.phys.size(); ++i)
        v |= static_cast<uint64_t>(tee.memory()[r.phys[i]]) << (8 * i);
    return v;
}

} // namespace

TEST_CASE("G recovers clear ids by residue") {
    CHECK(modular_clear_id(109, 278083) == 24);
    CHECK(modular_clear_id(109, 133) == 24);
    CHECK(modular_clear_id(500, 77) == 77); // small inputs are their own residue
}

TEST_CASE("foreign residues are rejected") {
    TeeRuntime tee(worked_key(), blank_image(40));
    CHECK(tee.clear_of(278083) == 24);
    // residue 50 is past the 40-byte data section
    CHECK_THROWS_AS(tee.clear_of(109 + 50), MemoryError);
}

TEST_CASE("H is a bijection for every counter") {
    for (uint32_t counter : {0u, 1u, 2u, 12u, 255u, 65535u}) {
        auto perm = page_permutation(0x5eed, counter, 0, 8);
        std::vector<uint16_t> sorted(perm.begin(), perm.end());
        std::sort(sorted.begin(), sorted.end());
        for (uint16_t i = 0; i < 8; ++i) CHECK(sorted[i] == i);
    }
    for (uint32_t counter = 0; counter < 64; ++counter) {
        auto perm = page_permutation(0x5eed, counter, 3, 256);
        std::vector<uint16_t> sorted(perm.begin(), perm.end());
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (uint32_t i = 0; i < 256; ++i) ok = ok && sorted[i] == i;
        CHECK(ok);
    }
}

TEST_CASE("different counters give different permutations") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        uint32_t c1 = static_cast<uint32_t>(rng.below(65536));
        uint32_t c2 = static_cast<uint32_t>(rng.below(65536));
        if (c1 == c2) c2 ^= 1;
        auto p1 = page_permutation(0x5eed, c1, 0, 256);
        auto p2 = page_permutation(0x5eed, c2, 0, 256);
        CHECK(p1 != p2);
    }
}

TEST_CASE("identity permutation fixture maps physical = clear") {
    TeeOptions opts;
    opts.identity_permutation = true;
    opts.shuffle_period_override = 0;
    TeeRuntime tee(worked_key(), blank_image(40), opts);
    auto r = tee.resolve(109 + 7, 1);
    REQUIRE(r.phys.size() == 1);
    CHECK(r.phys[0] == 7);
}

TEST_CASE("worked example: four H lookups at clear offsets 24..27 under counter 12") {
    TeeOptions opts;
    opts.log_h_calls = true;
    opts.shuffle_period_override = 0;
    TeeRuntime tee(worked_key(), blank_image(40), opts);
    for (int i = 0; i < 12; ++i) tee.shuffle_all();
    CHECK(tee.page_counter(0) == 12);
    tee.clear_h_log();
    auto r = tee.resolve(278083, 4);
    REQUIRE(r.phys.size() == 4);
    REQUIRE(tee.h_log().size() == 4);
    for (uint32_t j = 0; j < 4; ++j) {
        CHECK(tee.h_log()[j].counter == 12);
        CHECK(tee.h_log()[j].page == 0);
        CHECK(tee.h_log()[j].offset == 24 + j);
    }
}

TEST_CASE("shuffle preserves logical contents") {
    TeeOptions opts;
    opts.shuffle_period_override = 0;
    TeeRuntime tee(worked_key(), blank_image(40), opts);
    std::map<uint32_t, uint8_t> expect;
    for (uint32_t x = 0; x < 40; ++x) {
        auto r = tee.resolve(109 + x, 1);
        write_bytes(tee, r, x * 3 + 1);
        expect[x] = static_cast<uint8_t>(x * 3 + 1);
    }
    for (int round = 0; round < 10; ++round) {
        tee.shuffle_all();
        for (auto [x, v] : expect) {
            auto r = tee.resolve(109 + x, 1);
            CHECK(read_bytes(tee, r) == v);
        }
    }
}

TEST_CASE("same counter leaves the page unchanged") {
    TeeOptions opts;
    opts.shuffle_period_override = 0;
    TeeRuntime tee(worked_key(), blank_image(40), opts);
    auto r = tee.resolve(109 + 5, 1);
    write_bytes(tee, r, 99);
    auto before = tee.memory();
    tee.shuffle_page(0, tee.page_counter(0), tee.page_counter(0));
    CHECK(tee.memory() == before);
}

TEST_CASE("shuffling moves a fixed clear id with overwhelming probability") {
    TeeOptions opts;
    opts.shuffle_period_override = 0;
    TeeRuntime tee(worked_key(), blank_image(40), opts);
    int moved = 0;
    uint32_t prev = tee.resolve(109 + 24, 1).phys[0];
    for (int i = 0; i < 100; ++i) {
        tee.shuffle_all();
        uint32_t now = tee.resolve(109 + 24, 1).phys[0];
        if (now != prev) ++moved;
        prev = now;
    }
    CHECK(moved >= 99);
}

TEST_CASE("two resolves around a shuffle: new addresses, same value") {
    TeeOptions opts;
    opts.shuffle_period_override = 0;
    TeeRuntime tee(worked_key(), blank_image(40), opts);
    auto r1 = tee.resolve(109 * 3 + 24, 4);
    write_bytes(tee, r1, 0xdeadbeef);
    tee.shuffle_all();
    auto r2 = tee.resolve(109 * 5 + 24, 4);
    CHECK(r1.phys != r2.phys);
    CHECK(read_bytes(tee, r2) == 0xdeadbeef);
}

TEST_CASE("shuffle policy") {
    SUBCASE("period 1 shuffles before every access") {
        TeeRuntime tee(worked_key(1), blank_image(40));
        for (int i = 0; i < 10; ++i) tee.resolve(109 + 1, 1);
        CHECK(tee.stats().shuffles == 10);
    }
    SUBCASE("period 0 never shuffles") {
        TeeRuntime tee(worked_key(0), blank_image(40));
        for (int i = 0; i < 100; ++i) tee.resolve(109 + 1, 1);
        CHECK(tee.stats().shuffles == 0);
    }
    SUBCASE("expectation matches the period") {
        TeeRuntime tee(worked_key(6), blank_image(40));
        const int accesses = 30000;
        for (int i = 0; i < accesses; ++i) tee.resolve(109 + 1, 1);
        double rate = static_cast<double>(accesses) / static_cast<double>(tee.stats().shuffles);
        CHECK(rate == doctest::Approx(6.0).epsilon(0.05));
    }
    SUBCASE("pure predicate") {
        AccessStats s;
        s.accesses_since_shuffle = 0;
        CHECK(shuffle_due(s, 1));
        CHECK(!shuffle_due(s, 2));
        s.accesses_since_shuffle = 1;
        CHECK(shuffle_due(s, 2));
        CHECK(!shuffle_due(s, 0)); // 0 = never
    }
}

TEST_CASE("randomized write/shuffle/read battery") {
    KeyMaterial k = worked_key(3); // auto-shuffle roughly every 3 accesses
    k.flat_size = 300;             // spans two pages
    k.sk = 700;
    TeeRuntime tee(k, blank_image(300));
    std::map<uint32_t, uint32_t> shadow;
    Rng rng(0xbeef);
    for (int op = 0; op < 10000; ++op) {
        uint32_t x = static_cast<uint32_t>(rng.below(297));
        uint32_t width = rng.chance(0.5) ? 1 : 4;
        if (x + width > 300) continue;
        uint64_t id = x + (1 + rng.below(900)) * 700ull;
        if (rng.chance(0.4)) {
            uint32_t v = static_cast<uint32_t>(rng.below(width == 1 ? 256 : 0x100000000ull));
            auto r = tee.resolve(id, width);
            write_bytes(tee, r, v);
            for (uint32_t j = 0; j < width; ++j)
                shadow[x + j] = (v >> (8 * j)) & 0xff;
        } else {
            auto r = tee.resolve(id, width);
            uint64_t got = read_bytes(tee, r);
            uint64_t want = 0;
            for (uint32_t j = 0; j < width; ++j) {
                auto it = shadow.find(x + j);
                want |= static_cast<uint64_t>(it == shadow.end() ? 0 : it->second) << (8 * j);
            }
            CHECK(got == want);
        }
        if (rng.chance(0.05)) tee.shuffle_all();
    }
    CHECK(tee.stats().shuffles > 1000);
}

TEST_CASE("memory footprint pads to whole pages") {
    KeyMaterial k = worked_key(0);
    k.flat_size = 300;
    k.sk = 700;
    TeeRuntime tee(k, blank_image(300));
    CHECK(tee.page_count() == 2);
    CHECK(tee.memory().size() == 512);
}
