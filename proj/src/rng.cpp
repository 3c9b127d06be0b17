#include "godec/rng.hpp"

#include <cmath>
#include <numbers>

namespace godec {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

__extension__ typedef unsigned __int128 u128;

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngSeed RngSeed::derive(std::string_view child) const {
  std::string l = label;
  l += '/';
  l += child;
  return {seed, std::move(l)};
}

RngSeed RngSeed::derive(std::string_view child, std::uint64_t index) const {
  std::string c(child);
  c += '#';
  c += std::to_string(index);
  return derive(c);
}

RandomStream::RandomStream(const RngSeed& seed)
    : key_(splitmix64(splitmix64(seed.seed) ^ fnv1a(seed.label))) {}

std::uint64_t RandomStream::next_u64() noexcept {
  return splitmix64(key_ + kGolden * ++counter_);
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RandomStream::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next_u64();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace godec
