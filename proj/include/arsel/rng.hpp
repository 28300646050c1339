#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace arsel {

/// Purpose tags that keep the substreams of one replication apart.
enum class Stream : std::uint64_t {
    Shocks = 0x5348'4f43'4b53ULL,
    CouplingCopy = 0x434f'5059ULL,
    Experiment = 0x4558'5045ULL,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the substream keyed by (root seed, run id, purpose). Order independent:
/// replication r always sees the same stream no matter which thread runs it.
inline constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t run_id,
                                              Stream purpose) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(run_id + 0x632be59bd9b4e019ULL) ^
                      static_cast<std::uint64_t>(purpose));
}

/// Derive a child root seed, e.g. one per experiment cell.
inline constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index ^ 0xd1b54a32d192ed03ULL));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t run_id, Stream purpose) {
    return Engine{substream_seed(seed, run_id, purpose)};
}

/// i.i.d. standard Gaussian draws from one substream.
inline std::vector<double> standard_normals(std::size_t count, std::uint64_t seed,
                                            std::uint64_t run_id, Stream purpose) {
    auto engine = make_engine(seed, run_id, purpose);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(count);
    for (auto& v : out) v = normal(engine);
    return out;
}

}  // namespace arsel
