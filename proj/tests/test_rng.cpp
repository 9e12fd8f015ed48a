#include <array>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "mtlab/rng.hpp"
#include "oracles.hpp"

using mtlab::RandomStream;
using mtlab::SeedSpec;

TEST_CASE("philox4x32-10 reproduces the published known-answer vectors") {
  using mtlab::detail::philox4x32_10;
  const std::array<std::uint32_t, 4> zero = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  const std::array<std::uint32_t, 4> ones = philox4x32_10(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  const std::array<std::uint32_t, 4> pi = philox4x32_10(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("stream layout pins: key = master seed, counter = (block, stream)") {
  RandomStream stream(SeedSpec{0x123456789abcdef0ull, 5});
  CHECK(stream.next_u64() == 0x70bbc61faead3422ull);
  CHECK(stream.next_u64() == 0x27d55addc86a83d9ull);  // second half of block 0
  CHECK(stream.next_u64() == 0xfa2f013f72f03c2cull);  // block 1
  CHECK(stream.next_u64() == 0xd621928691ebb87full);
}

TEST_CASE("substreams are deterministic and distinct") {
  const SeedSpec seed{42, 7};
  RandomStream a = mtlab::substream(seed);
  RandomStream b = mtlab::substream(seed);
  bool same = true;
  for (int i = 0; i < 1000; ++i) {
    same = same && (a.next_u64() == b.next_u64());
  }
  CHECK(same);

  RandomStream c(SeedSpec{42, 7});
  RandomStream d(SeedSpec{42, 8});
  RandomStream e(SeedSpec{43, 7});
  bool differs_stream = false;
  bool differs_master = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t x = c.next_u64();
    differs_stream = differs_stream || (x != d.next_u64());
    differs_master = differs_master || (x != e.next_u64());
  }
  CHECK(differs_stream);
  CHECK(differs_master);
}

TEST_CASE("domains of one stream do not overlap") {
  RandomStream base(SeedSpec{1, 2}, 0);
  RandomStream other(SeedSpec{1, 2}, 1);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    differs = differs || (base.next_u64() != other.next_u64());
  }
  CHECK(differs);
}

TEST_CASE("next_unit lies strictly inside (0,1)") {
  RandomStream stream(SeedSpec{2024, 0});
  for (int i = 0; i < 100000; ++i) {
    const double u = stream.next_unit();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_below respects the bound and rejects zero") {
  RandomStream stream(SeedSpec{9, 9});
  for (int i = 0; i < 10000; ++i) {
    CHECK(stream.next_below(6) < 6);
  }
  CHECK(stream.next_below(1) == 0);
  CHECK_THROWS_AS(stream.next_below(0), std::invalid_argument);
}

TEST_CASE("uniformity: chi-square over 1024 bins on 1e6 draws at level 0.001") {
  RandomStream stream(SeedSpec{777, 0});
  std::vector<double> sample(1000000);
  for (double& u : sample) u = stream.next_unit();
  CHECK(oracle::chi_square_uniform(sample, 1024) <= oracle::kChiSqCrit999Df1023);
}

TEST_CASE("adjacent streams look independent: paired 16x16 chi-square") {
  RandomStream a(SeedSpec{555, 10});
  RandomStream b(SeedSpec{555, 11});
  constexpr std::size_t kPairs = 100000;
  std::vector<std::size_t> counts(256, 0);
  for (std::size_t i = 0; i < kPairs; ++i) {
    const auto bin_a = static_cast<std::size_t>(a.next_unit() * 16.0);
    const auto bin_b = static_cast<std::size_t>(b.next_unit() * 16.0);
    ++counts[std::min<std::size_t>(bin_a, 15) * 16 + std::min<std::size_t>(bin_b, 15)];
  }
  const double expected = static_cast<double>(kPairs) / 256.0;
  double stat = 0.0;
  for (const std::size_t count : counts) {
    const double diff = static_cast<double>(count) - expected;
    stat += diff * diff / expected;
  }
  CHECK(stat <= oracle::kChiSqCrit999Df255);
}
