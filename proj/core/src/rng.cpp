#include "synact/rng.hpp"

#include "synact/error.hpp"

namespace synact {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (lo == hi) return lo;
    // Scale [0, 2^53] inclusive so both endpoints are reachable.
    const double u = static_cast<double>(next_u64() >> 11) / static_cast<double>((1ULL << 53) - 1);
    const double v = lo + (hi - lo) * u;
    return v > hi ? hi : (v < lo ? lo : v);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ContractError("Rng::below requires n > 0");
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

void StableHasher::bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h_ ^= p[i];
        h_ *= 1099511628211ULL;
    }
}

StableHasher& StableHasher::add(std::string_view s) {
    add(static_cast<std::uint64_t>(s.size()));
    bytes(s.data(), s.size());
    return *this;
}

StableHasher& StableHasher::add(std::uint64_t v) {
    unsigned char le[8];
    for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(le, 8);
    return *this;
}

}  // namespace synact
