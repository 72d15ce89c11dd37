#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace oscbo {

/// Counter-based splittable generator.
///
/// The i-th draw of a stream is `mix64(key + i * kGolden)` where `mix64` is the
/// SplitMix64 finalizer, so a stream is fully described by its key and the
/// number of words already consumed. `split(label)` derives a child key from
/// the parent *key* and an FNV-1a hash of the label; it does not depend on how
/// many words the parent has consumed, so children are reproducible from
/// (seed, label path) alone.
///
/// Consumption contract:
///  - `next_u64()` consumes one word.
///  - `uniform()` consumes one word (top 53 bits, result in [0, 1)).
///  - `gaussian()` uses the Marsaglia polar method: each accepted pair consumes
///    2k words (k >= 1 rejection rounds) and yields two normals; the second is
///    cached and returned by the next call without consuming anything.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  Rng split(std::string_view label) const noexcept;

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;
  double gaussian() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t consumed() const noexcept { return counter_; }

 private:
  Rng(std::uint64_t key, bool /*raw*/) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace oscbo
