#pragma once

#include <cstdint>
#include <limits>

namespace pins {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: draw k is mix64(key + (k + 1) * golden gamma), so
/// a stream is fully determined by its key and never shares state with
/// another stream. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    /// Key of substream `stream` for path `path` under `master_seed`.
    static constexpr CounterRng for_path(std::uint64_t master_seed, std::uint64_t path,
                                         std::uint64_t stream) {
        const std::uint64_t seed_key = mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
        const std::uint64_t path_key = mix64(seed_key + mix64(path + 0x3c6ef372fe94f82bULL));
        return CounterRng(mix64(path_key ^ mix64(stream + 0xa54ff53a5f1d36f1ULL)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(key_ + counter_);
    }

    /// Uniform draw strictly inside (0, 1).
    constexpr double uniform_open() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pins
