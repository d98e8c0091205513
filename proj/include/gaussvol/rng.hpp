#pragma once

#include <cstdint>
#include <random>

namespace gaussvol {

/// splitmix64 finalizer; used to derive well-separated generator states.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator so it plugs
/// into <random> distributions.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : s_) {
            z += 0x9E3779B97F4A7C15ULL;
            word = mix64(z);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
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

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

/// A reproducible random stream identified by (seed, stream_id).
///
/// Distinct stream ids under one seed are hashed into unrelated generator
/// states; the same pair always replays the same sequence. Streams are not
/// thread-safe; give each concurrent chain its own.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), engine_(mix64(seed) ^ mix64(~stream_id * 0xD1B54A32D192ED03ULL)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Child stream for sub-task `index`; depends only on (seed, stream_id, index).
    RngStream split(std::uint64_t index) const {
        return RngStream(seed_, mix64(stream_id_ ^ mix64(index + 0x632BE59BD9B4E019ULL)));
    }

    /// Uniform on (0, 1].
    double uniform_open_closed() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() { return normal_(engine_); }

    bool coin() { return (engine_() >> 63) != 0; }

    Xoshiro256& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    Xoshiro256 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gaussvol
