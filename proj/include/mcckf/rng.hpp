#pragma once

// Deterministic, platform-stable random source for trajectory generation.
//
// The generator is std::mt19937_64, whose output stream is fixed by the
// C++ standard. The distribution mappings are implemented here (not via
// std::normal_distribution / std::uniform_int_distribution, whose algorithms
// are implementation-defined) so a given seed produces identical draws on
// every platform and toolchain:
//   - uniform01(): (x >> 11) * 2^-53 from one 64-bit word, in [0,1).
//   - normal(): Box-Muller on two uniform01 draws, u clamped away from 0;
//     both values of the pair are consumed (spare cached).
//   - uniformInt(lo,hi): rejection sampling on the high bits, unbiased.
//   - distinctInts(count,lo,hi): partial Fisher-Yates over [lo,hi].

#include <cstdint>
#include <random>
#include <vector>

namespace mcckf {

class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  // Uniform double in [0,1) with 53 random bits.
  double uniform01();

  // Standard normal via Box-Muller; pairs are generated together and the
  // second value is returned by the next call.
  double normal();

  // Uniform integer in [lo, hi] (inclusive), unbiased via rejection.
  long uniformInt(long lo, long hi);

  // `count` distinct integers from [lo, hi], sampled without replacement
  // (partial Fisher-Yates), returned in selection order.
  std::vector<long> distinctInts(long count, long lo, long hi);

 private:
  std::mt19937_64 eng_;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcckf
