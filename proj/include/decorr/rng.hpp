#pragma once

#include <cstdint>
#include <vector>

namespace decorr {

// splitmix64; used to derive sub-seeds and as the permutation stream.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t s = a ^ (b * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
    return splitmix64(s);
}

// Deterministic RNG with portable bounded draws. std::uniform_int_distribution
// is implementation-defined, so all sampling in the project goes through this.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bULL) {}

    uint64_t next() { return splitmix64(state_); }

    // uniform in [0, bound), bound > 0; rejection sampling to avoid modulo bias
    uint64_t below(uint64_t bound) {
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform in [lo, hi] inclusive
    uint64_t between(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

    bool chance(double p) {
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0) < p;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng fork() { return Rng(next()); }

private:
    uint64_t state_;
};

} // namespace decorr
