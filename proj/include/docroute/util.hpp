#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace docroute {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// Incremental FNV-1a 64-bit hash. Used for cache keys, dataset hashes and
/// the index-bundle footer checksum.
struct Fnv64 {
    std::uint64_t state = kFnvOffset;

    void update(const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state ^= bytes[i];
            state *= kFnvPrime;
        }
    }

    void update(std::string_view s) { update(s.data(), s.size()); }

    std::uint64_t digest() const { return state; }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    Fnv64 h;
    h.update(s);
    return h.digest();
}

std::string to_hex(std::uint64_t value);

std::string base64_encode(std::span<const std::uint8_t> data);
std::string base64_encode(std::string_view data);

/// Deterministic RNG wrapper. mt19937_64 is fully specified by the standard
/// and `below` uses plain modulo reduction, so sequences are reproducible
/// across platforms and standard libraries.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    /// Uniform double in [0, 1).
    double unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

/// Round to one decimal place (percent reporting convention).
inline double round1(double x) {
    return std::round(x * 10.0) / 10.0;
}

} // namespace docroute
