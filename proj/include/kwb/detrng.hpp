// Deterministic pseudo-random source for randomized sweeps. splitmix64
// steps, hand-rolled bounded draw; identical seeds give identical streams on
// every platform, which keeps JSON reports byte-reproducible.
#pragma once

#include <cstdint>

namespace kwb {

struct DetRng {
    uint64_t state;

    explicit DetRng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n); n >= 1
    uint64_t below(uint64_t n) {
        uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    long long range(long long lo, long long hi) {  // inclusive
        return lo + static_cast<long long>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    bool coin() { return next() & 1; }
};

}  // namespace kwb
