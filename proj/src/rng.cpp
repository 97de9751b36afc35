#include "causalflow/rng.hpp"

#include <cmath>
#include <numbers>

namespace causalflow {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : base_(mix64(mix64(seed + kGolden) + kGolden * (stream + 1))) {}

std::uint64_t CounterRng::at(std::uint64_t i) const {
    return mix64(base_ + kGolden * (i + 1));
}

double CounterRng::next_open_unit() {
    // top 53 bits, shifted into (0, 1]
    return static_cast<double>((next_bits() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_normal() {
    const double u1 = next_open_unit();
    const double u2 = static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace causalflow
