// Counter-based random streams (Philox4x32-10).
//
// Every output is a pure function of (master_seed, stream_id, position), so
// per-trial substreams are reproducible regardless of scheduling and distinct
// stream ids never share state.

#pragma once

#include <array>
#include <cstdint>

#include "mtlab/types.hpp"

namespace mtlab {

namespace detail {

// One Philox4x32-10 block (Salmon et al. constants).
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t mult0 = 0xD2511F53u;
  constexpr std::uint32_t mult1 = 0xCD9E8D57u;
  constexpr std::uint32_t bump0 = 0x9E3779B9u;
  constexpr std::uint32_t bump1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += bump0;
      key[1] += bump1;
    }
    const std::uint64_t prod0 = static_cast<std::uint64_t>(mult0) * ctr[0];
    const std::uint64_t prod1 = static_cast<std::uint64_t>(mult1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(prod1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(prod1),
           static_cast<std::uint32_t>(prod0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(prod0)};
  }
  return ctr;
}

}  // namespace detail

// Sequential view of one substream. Draw positions are indexed by a 128-bit
// counter (block, stream_id); a domain tag partitions the block space so
// independent uses within one trial (e.g. status placement vs. Z draws)
// cannot collide no matter how many values each consumes.
class RandomStream {
 public:
  explicit RandomStream(SeedSpec seed, std::uint64_t domain = 0)
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32)},
        stream_(seed.stream_id),
        block_(domain << kDomainShift) {}

  std::uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 4> out = detail::philox4x32_10(ctr, key_);
    ++block_;
    spare_ = static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
    have_spare_ = true;
    return static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
  }

  // Uniform double strictly inside (0,1): 53 random bits centered in the bin.
  double next_unit() {
    constexpr double scale = 0x1.0p-53;
    return (static_cast<double>(next_u64() >> 11) + 0.5) * scale;
  }

  // Unbiased draw in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RandomStream::next_below: n must be positive");
    const std::uint64_t limit = (0 - n) % n;
    std::uint64_t x = next_u64();
    while (x < limit) x = next_u64();
    return x % n;
  }

  static constexpr unsigned kDomainShift = 58;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

inline RandomStream substream(SeedSpec seed) { return RandomStream(seed); }

}  // namespace mtlab
