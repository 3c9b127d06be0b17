#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace godec {

// Determinism carrier: (seed, label) names one reproducible random stream.
// Child streams are derived by extending the label, so every consumer
// (A1 draw of iteration t, trial j of cell i, ...) gets its own substream
// independent of evaluation order.
struct RngSeed {
  std::uint64_t seed = 0;
  std::string label;

  RngSeed derive(std::string_view child) const;
  RngSeed derive(std::string_view child, std::uint64_t index) const;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

// Counter-based splitmix64 stream. Value i of the stream is a pure function
// of (key, i), so two streams built from the same RngSeed agree bit for bit.
class RandomStream {
 public:
  explicit RandomStream(const RngSeed& seed);

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace godec
