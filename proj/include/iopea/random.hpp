#pragma once

#include <cstdint>
#include <random>

namespace iopea {

// Streams are derived from (seed, replicate, epoch, slot) so any block of
// play can be regenerated independently of what ran before it.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::uint64_t epoch = 0;
    std::uint64_t slot = 0;
};

// Reserved epoch tags for streams that are not part of an IOPEA epoch.
inline constexpr std::uint64_t kCommitEpoch = 1u << 30;
inline constexpr std::uint64_t kOracleEpoch = (1u << 30) + 1;
inline constexpr std::uint64_t kBaselineEpoch = (1u << 30) + 2;

class RandomStream {
public:
    explicit RandomStream(const StreamKey& key) {
        std::seed_seq seq{
            static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32),
            static_cast<std::uint32_t>(key.replicate), static_cast<std::uint32_t>(key.replicate >> 32),
            static_cast<std::uint32_t>(key.epoch), static_cast<std::uint32_t>(key.epoch >> 32),
            static_cast<std::uint32_t>(key.slot), static_cast<std::uint32_t>(key.slot >> 32)};
        engine_.seed(seq);
    }

    // [0, 1)
    double uniform() { return std::generate_canonical<double, 53>(engine_); }

    double exponential(double mean) { return std::exponential_distribution<double>(1.0 / mean)(engine_); }

    double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(engine_); }

    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace iopea
