#pragma once

#include <cstdint>

namespace quartic {

// Deterministic xoshiro256** generator. The standard library engines are
// portable but its distributions are not, so uniform sampling is done here
// by rejection and results are identical on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    uint64_t u64() {
        uint64_t r = rotl(s_[1] * 5, 7) * 9;
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return r;
    }

    // uniform in [0, n), n >= 1
    uint64_t below(uint64_t n) {
        uint64_t lim = ~uint64_t{0} - ~uint64_t{0} % n;
        uint64_t v;
        do { v = u64(); } while (v >= lim);
        return v % n;
    }

    bool coin() { return u64() & 1; }

    // independent child stream; tags keep parallel tasks reproducible
    Rng child(uint64_t tag) {
        uint64_t x = s_[0] ^ rotl(tag, 31);
        x ^= 0x9e3779b97f4a7c15ULL + (s_[3] << 1);
        return Rng(splitmix64(x) ^ tag);
    }

    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    uint64_t s_[4];
};

// stable seed derivation for (seed, p, slot) tasks
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t x = seed ^ (a * 0xd1342543de82ef95ULL);
    Rng::splitmix64(x);
    x ^= b * 0xaf251af3b0f025b5ULL;
    return Rng::splitmix64(x);
}

} // namespace quartic
