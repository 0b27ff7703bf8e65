#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ibn {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

// Stream of random words keyed by (seed, stream id). Two streams with
// different ids never overlap, and the value at position i depends only
// on (seed, stream, i).
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open();
  // Uniform on [0, 1).
  double uniform();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int pos_ = 4;
};

// Random streams are partitioned by purpose so that unrelated consumers
// sharing a seed never read the same counter block.
enum class Purpose : std::uint64_t {
  kWalk = 1,
  kConductance = 2,
  kPercolation = 3,
  kSearch = 4,
  kTest = 15,
};

constexpr std::uint64_t stream_id(Purpose p, std::uint64_t index) {
  return (static_cast<std::uint64_t>(p) << 48) | (index & ((std::uint64_t{1} << 48) - 1));
}

// Single draw in (0,1) addressed directly by (seed, stream, index).
double keyed_uniform(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index);

}  // namespace ibn
