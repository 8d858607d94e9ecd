#pragma once

#include <cstdint>

namespace levymix {

namespace detail {

// SplitMix64 finalizer: bijective 64-bit mix with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based random stream: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation
// order or on how work is split across threads.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(detail::mix64(detail::mix64(seed) ^
                             detail::mix64(stream * 0xd2b74407b1ce6e93ULL + 1))) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return detail::mix64(key_ ^ detail::mix64(counter + 0x632be59bd9b4e019ULL));
    }

    // Uniform draw in the open interval (0, 1).
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
};

}  // namespace levymix
