#pragma once

#include <cstdint>

namespace causalflow {

// Counter-based random streams built on the splitmix64 finalizer. A stream
// is identified by (seed, stream id); the value at position i is a pure
// function of (seed, stream, i), so substreams can be generated in parallel
// with results identical to sequential generation.
//
// Identity:
//   mix(z)   = splitmix64 finalizer
//   base     = mix(mix(seed + GOLDEN) + GOLDEN * (stream + 1))
//   draw(i)  = mix(base + GOLDEN * (i + 1))
// with GOLDEN = 0x9e3779b97f4a7c15.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_bits() { return at(counter_++); }
    std::uint64_t at(std::uint64_t i) const;

    // uniform in (0, 1]; never returns 0, safe under log()
    double next_open_unit();

    // standard normal via Box-Muller (cosine branch; two draws per value)
    double next_normal();

  private:
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace causalflow
