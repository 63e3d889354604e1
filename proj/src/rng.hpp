#pragma once

#include <cstdint>
#include <limits>

namespace cmt::detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream keyed by (seed, stream index): the n-th output is a
/// pure function of (seed, stream, n), so a path's draws never depend on
/// which worker runs it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(seed) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cmt::detail
