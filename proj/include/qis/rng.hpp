#ifndef QIS_RNG_HPP
#define QIS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace qis {

// splitmix64 (Vigna / Steele et al.): used for seed expansion and for
// deriving independent stream seeds. Small state, passes BigCrush when
// used as intended here (a handful of outputs per seed).
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). Deterministic 64-bit generator used for
// all trajectory simulation. Stream-splitting contract for parallel work:
// stream i of a base seed is seeded from splitmix64(seed XOR (i+1)*GAMMA),
// so replications and sweep points get disjoint, reproducible streams.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    static Xoshiro256pp for_stream(std::uint64_t seed, std::uint64_t stream) {
        constexpr std::uint64_t GAMMA = 0x9E3779B97F4A7C15ull;
        return Xoshiro256pp(seed ^ ((stream + 1) * GAMMA));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1) with 53 random bits
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // exponential holding time with the given rate
    double exponential(double rate) {
        return -std::log(1.0 - uniform01()) / rate;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int r) {
        return (x << r) | (x >> (64 - r));
    }
    std::uint64_t s_[4];
};

} // namespace qis

#endif
