#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sparseforge {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Deterministic counter-free generator (splitmix64). Every randomized stage
// of the pipeline derives its stream from (seed, record index) so output is
// independent of scheduling and platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    static Rng for_record(std::uint64_t seed, std::uint64_t record) {
        Rng r(seed);
        r.state_ = mix(r.state_ + mix(record + 0xbf58476d1ce4e5b9ull));
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// FNV-1a, used for vocab manifests and the mock encoder's token features.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace sparseforge
