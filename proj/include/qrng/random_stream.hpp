#pragma once

// Simulator-internal pseudo-randomness. Every gate owns an independent
// stream keyed by (seed, gate_index), so any partition of a run across
// workers replays exactly the same draws.

#include <cmath>
#include <cstdint>
#include <limits>

namespace qrng::random {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through SplitMix64 from a (seed, stream index) key.
/// Satisfies UniformRandomBitGenerator.
class KeyedStream {
  public:
    using result_type = std::uint64_t;

    KeyedStream(std::uint64_t seed, std::uint64_t stream_index) noexcept {
        std::uint64_t sm = seed;
        const std::uint64_t seed_key = splitmix64(sm);
        std::uint64_t key = seed_key ^ (stream_index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
        for (auto& word : s_) {
            word = splitmix64(key);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
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

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
};

/// Poisson variate by sequential inversion. Means above 30 are split into
/// chunks and the (independent) chunk variates summed, which keeps e^{-mean}
/// far from underflow without changing the distribution.
template <class Stream>
unsigned sample_poisson(double mean, Stream& stream) {
    constexpr double kChunk = 30.0;
    unsigned total = 0;
    while (mean > 0.0) {
        const double lambda = mean > kChunk ? kChunk : mean;
        mean -= lambda;
        const double u = stream.uniform();
        unsigned k = 0;
        double p = std::exp(-lambda);
        double cdf = p;
        while (u >= cdf) {
            ++k;
            p *= lambda / k;
            const double next = cdf + p;
            if (next == cdf) {
                break;  // u sits in the last ulp of the cdf; accept the current k
            }
            cdf = next;
        }
        total += k;
    }
    return total;
}

}  // namespace qrng::random
