#pragma once

#include <cstdint>
#include <random>

namespace weilbc {

/// Seeded generator whose output sequence is identical on every platform.
/// std::uniform_int_distribution is implementation-defined, so bounded draws
/// are done here by rejection on the raw 64-bit engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

  /// Derive an independent stream, e.g. one per report case.
  Rng fork(std::uint64_t salt) { return Rng(engine_() ^ (salt * 0x9e3779b97f4a7c15ULL)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace weilbc
