#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace synact {

// SplitMix64 generator. The state update and output mix are fixed
// integer arithmetic, so a seed yields the same stream on every platform
// and compiler (unlike std::uniform_*_distribution).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 random bits.
    double uniform();
    // Uniform in [lo, hi]; returns lo when lo == hi.
    double uniform(double lo, double hi);
    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Stable 64-bit hash of a tuple of strings and integers. Uses FNV-1a over
// length-prefixed fields followed by mix64, so ("ab","c") != ("a","bc").
class StableHasher {
public:
    StableHasher& add(std::string_view s);
    StableHasher& add(std::uint64_t v);
    std::uint64_t finish() const { return mix64(h_); }

private:
    void bytes(const void* data, std::size_t n);
    std::uint64_t h_ = 1469598103934665603ULL;
};

}  // namespace synact
