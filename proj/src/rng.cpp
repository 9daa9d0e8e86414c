#include "mcckf/rng.hpp"

#include <cmath>
#include <numbers>

#include "mcckf/errors.hpp"

namespace mcckf {

double GaussianRng::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double GaussianRng::normal() {
  if (hasSpare_) {
    hasSpare_ = false;
    return spare_;
  }
  // Box-Muller: r = sqrt(-2 ln u1), angle = 2 pi u2.
  double u1 = uniform01();
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;  // avoid log(0)
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  hasSpare_ = true;
  return r * std::cos(t);
}

long GaussianRng::uniformInt(long lo, long hi) {
  if (lo > hi) throw ConfigError("uniformInt: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling: draw from the largest multiple of `span` below 2^64.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return lo + static_cast<long>(x % span);
}

std::vector<long> GaussianRng::distinctInts(long count, long lo, long hi) {
  const long size = hi - lo + 1;
  if (count < 0 || count > size)
    throw ConfigError("distinctInts: count out of range");
  std::vector<long> pool(static_cast<size_t>(size));
  for (long i = 0; i < size; ++i) pool[static_cast<size_t>(i)] = lo + i;
  std::vector<long> out;
  out.reserve(static_cast<size_t>(count));
  for (long i = 0; i < count; ++i) {
    const long j = uniformInt(i, size - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
    out.push_back(pool[static_cast<size_t>(i)]);
  }
  return out;
}

}  // namespace mcckf
