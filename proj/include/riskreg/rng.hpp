#pragma once

#include <cmath>
#include <cstdint>

namespace riskreg {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** with splitmix64 seeding. Results are identical across
// platforms and standard libraries, which is what the per-replicate
// determinism contract requires (std::uniform_int_distribution is not
// portable across implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) { init(mix64(seed)); }

    // Stream-keyed constructor: the draw sequence depends only on
    // (master_seed, stream), never on which worker runs it.
    Rng(std::uint64_t master_seed, std::uint64_t stream) {
        init(mix64(master_seed) ^ mix64(stream * 0xd1342543de82ef95ULL + 1));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased draw in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    // Standard normal via Box-Muller; two uniforms per draw, no cached state.
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    void init(std::uint64_t key) {
        std::uint64_t z = key;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = mix64(z);
        }
    }

    std::uint64_t s_[4];
};

}  // namespace riskreg
