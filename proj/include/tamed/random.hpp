#pragma once

#include <array>
#include <cstdint>

namespace tamed {

/// Philox4x32-10 block function: maps a 128-bit counter under a 64-bit key to
/// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser, used to spread seeds and indices over the key space.
std::uint64_t mix64(std::uint64_t z);

enum class Lane : std::uint32_t { brownian = 1, jump_times = 2, jump_marks = 3 };

struct StreamKey {
  std::uint64_t base_seed = 0;
  std::uint64_t path_index = 0;
  Lane lane = Lane::brownian;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Counter-based random stream. The Philox key is derived from
/// (base_seed, path_index); the lane occupies a counter word, so lanes of one
/// path walk disjoint counter ranges. Equal keys give bit-identical streams on
/// any thread or process.
///
/// Gaussian draws use the Marsaglia polar method on 53-bit uniforms; the
/// second variate of each accepted pair is cached and returned next.
class RandomStream {
 public:
  explicit RandomStream(const StreamKey& key);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }
  double normal();
  /// Poisson variate by sequential inversion; large means are split into
  /// chunks so exp(-mean) never underflows.
  std::uint64_t poisson(double mean);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t lane_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int consumed_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline RandomStream derive_stream(const StreamKey& key) { return RandomStream(key); }

}  // namespace tamed
