#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace pcornet {

/// Counter-based generator: the i-th output is SplitMix64's finalizer applied
/// to key + i * golden_gamma. Output depends only on (key, i), so streams are
/// reproducible bit-for-bit on every platform, and the standard library's
/// implementation-defined distributions are never used.
class Rng {
public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via the Box-Muller transform.
  double normal();
  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);
  double beta(double a, double b);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

/// Stable child seed from a root seed and a path of integer tags, e.g.
/// derive_seed(root, {scenario, replication}).
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

}  // namespace pcornet
