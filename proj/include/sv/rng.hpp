#pragma once

#include <cstdint>

namespace sv {

// splitmix64 (Steele, Lea, Flood 2014). Chosen because the whole algorithm
// fits in a dozen lines, so identical seeds reproduce identical streams on
// any platform and in any reimplementation. Bounded draws use rejection
// sampling; Bernoulli draws use the top 53 bits as a uniform double.
class rng {
public:
    static constexpr const char* algorithm = "splitmix64";

    explicit rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n); n >= 1
    uint64_t below(uint64_t n) {
        // rejection to remove modulo bias
        uint64_t limit = ~uint64_t{0} - ~uint64_t{0} % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double unit() { return (next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p <= 0.0) { next_u64(); return false; }
        if (p >= 1.0) { next_u64(); return true; }
        return unit() < p;
    }

private:
    uint64_t state_;
};

} // namespace sv
