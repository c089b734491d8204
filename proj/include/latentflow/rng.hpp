#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace latentflow {

struct RngSeed {
    uint64_t seed = 0;
};

// All stochastic choices in the project go through this wrapper. The raw
// mt19937_64 stream is fully specified by the standard; distributions are not,
// so uniform draws and shuffles are spelled out here to keep trained models
// byte-reproducible across library versions.
class Rng {
public:
    explicit Rng(RngSeed s) : engine_(s.seed) {}
    explicit Rng(uint64_t s) : engine_(s) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, bound). Multiply-shift; the modulo bias is far
    // below anything observable at our index ranges but we keep it exact by
    // widening to 128 bits.
    uint64_t next_below(uint64_t bound) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(engine_()) * bound) >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Derives independent sub-seeds (init streams, shuffle stream, ...) from one
// user-facing seed.
inline uint64_t split_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace latentflow
