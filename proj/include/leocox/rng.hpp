#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace leocox::mc {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
/// independent stream; each Monte Carlo trial uses its own stream so that
/// results do not depend on how trials are spread over workers.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;  // 64-bit words consumed from block_ (0..2), 4 means empty
};

}  // namespace leocox::mc
