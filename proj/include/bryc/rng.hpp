#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream id, draw index), so ensembles do not depend on scheduling.

#include <array>
#include <cstdint>

namespace bryc {

/// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal quantile function, u in (0, 1).
double normal_quantile(double u);

class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Uniform variate in the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Standard normal variate by inverse-CDF transform of uniform().
  double normal();

  std::uint64_t next_u64();

  std::uint64_t draws() const { return index_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t index_ = 0;  // 64-bit words consumed
  std::array<std::uint32_t, 4> block_{};
};

}  // namespace bryc
