#ifndef SLICENET_COMMON_HPP
#define SLICENET_COMMON_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace slicenet {

// Malformed inputs: unknown ids, missing demand vectors, mismatched vector sizes.
struct structural_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Counter-based deterministic RNG (splitmix64). Portable across platforms and
// standard libraries, unlike <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed; used for replication substreams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ull * (tag + 0x632be59bd9b4e019ull));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline bool approx_equal(double a, double b, double rel, double abs = 0.0) {
    double diff = a > b ? a - b : b - a;
    double scale = std::max(a > 0 ? a : -a, b > 0 ? b : -b);
    return diff <= abs || diff <= rel * scale;
}

} // namespace slicenet

#endif
