#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace vrstab {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for an independent sub-stream: mix(base, id). Distinct ids give
/// decorrelated seeds; the odd multiplier is the 64-bit golden ratio.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t id) {
  return mix64(base ^ mix64(id * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL));
}

/// Counter-based stream of uniform indices. Every draw consumes exactly one
/// slot, so draws can be peeked ahead of time and two streams with the same
/// seed produce the same sequence for the same bounds.
class IndexStream {
 public:
  explicit IndexStream(std::uint64_t seed = 0, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  /// Uniform draw from {0, ..., bound-1}; consumes one slot.
  std::size_t next_below(std::size_t bound) { return draw(counter_++, bound); }

  /// The value next_below(bound) would return `offset` draws from now.
  std::size_t peek_below(std::size_t bound, std::uint64_t offset = 0) const {
    return draw(counter_ + offset, bound);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  // Lemire's multiply-shift with rejection; retries stay inside the slot.
  std::size_t draw(std::uint64_t slot, std::size_t bound) const {
    if (bound == 0) throw std::invalid_argument("IndexStream: empty range");
    const std::uint64_t range = bound;
    const std::uint64_t slot_key = mix64(seed_ ^ mix64(slot));
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t x = mix64(slot_key + attempt * 0xD1B54A32D192ED03ULL);
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * range;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= range || low >= (-range) % range) {
        return static_cast<std::size_t>(m >> 64);
      }
    }
  }

  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace vrstab
