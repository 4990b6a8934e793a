#include <doctest.h>

#include <cmath>

#include "tamed/random.hpp"

using namespace tamed;

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors published with the Random123 library.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("equal keys give identical streams") {
  const StreamKey key{7, 3, Lane::brownian};
  RandomStream a = derive_stream(key);
  RandomStream unrelated = derive_stream({7, 4, Lane::brownian});
  for (int i = 0; i < 10; ++i) unrelated.next_u64();
  RandomStream b = derive_stream(key);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("path index and lane separate streams") {
  RandomStream base({7, 3, Lane::brownian});
  RandomStream other_path({7, 4, Lane::brownian});
  RandomStream other_lane({7, 3, Lane::jump_times});
  RandomStream other_seed({8, 3, Lane::brownian});
  const auto first = base.next_u64();
  CHECK(first != other_path.next_u64());
  CHECK(first != other_lane.next_u64());
  CHECK(first != other_seed.next_u64());
}

TEST_CASE("uniform and normal draws have the right moments") {
  RandomStream s({1, 0, Lane::brownian});
  constexpr int kCount = 200000;
  double sum_u = 0.0, sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
  for (int i = 0; i < kCount; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum_u += u;
    const double z = s.normal();
    sum += z;
    sum_sq += z * z;
    sum_4 += z * z * z * z;
  }
  // Standard errors: sqrt(1/12/N), 1/sqrt(N), sqrt(2/N), sqrt(96/N).
  CHECK(std::abs(sum_u / kCount - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / kCount));
  CHECK(std::abs(sum / kCount) < 4.0 / std::sqrt(kCount));
  CHECK(std::abs(sum_sq / kCount - 1.0) < 4.0 * std::sqrt(2.0 / kCount));
  CHECK(std::abs(sum_4 / kCount - 3.0) < 4.0 * std::sqrt(96.0 / kCount));
}

TEST_CASE("poisson counts match mean and variance") {
  for (double mean : {0.5, 3.0, 40.0, 1200.0}) {
    RandomStream s({2, 0, Lane::jump_times});
    constexpr int kCount = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < kCount; ++i) {
      const double k = static_cast<double>(s.poisson(mean));
      sum += k;
      sum_sq += k * k;
    }
    const double m = sum / kCount;
    const double var = sum_sq / kCount - m * m;
    CAPTURE(mean);
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / kCount));
    CHECK(std::abs(var / mean - 1.0) < 0.05);
  }
  RandomStream s({2, 0, Lane::jump_times});
  CHECK(s.poisson(0.0) == 0);
}
