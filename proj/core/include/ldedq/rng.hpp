#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace ldedq {

/// One step of SplitMix64; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for substream `stream` of `seed`. Distinct streams give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * Portable random stream. The engine is std::mt19937_64, whose output sequence
 * is fixed by the standard; the uniform mappings below are implemented here
 * rather than through <random> distributions so draws match across toolchains.
 *
 * Training uses one stream per episode: Rng(seed, episode).
 */
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64+splitmix64-substreams";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform integer on [0, n); n must be > 0.
    std::size_t below(std::size_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace ldedq
