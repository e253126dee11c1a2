#pragma once

// Counter-based random numbers (Philox4x32-10). Every draw is a pure
// function of (key, stream index, counter), so any subset of paths can be
// regenerated without touching the others.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace bsde {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent sub-stream seed from a master seed and a name.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return splitmix64(seed ^ splitmix64(h));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_{lo(seed), hi(seed)} {}

  // Four raw 32-bit words for (stream, counter).
  std::array<std::uint32_t, 4> block(std::uint64_t stream,
                                     std::uint64_t counter) const {
    std::array<std::uint32_t, 4> c{lo(counter), hi(counter), lo(stream),
                                   hi(stream)};
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      c = {hi(p1) ^ c[1] ^ k[0], lo(p1), hi(p0) ^ c[3] ^ k[1], lo(p0)};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return c;
  }

  // Uniform on (0,1), two per block.
  double uniform(std::uint64_t stream, std::uint64_t index) const {
    const auto b = block(stream, index / 2);
    const std::uint64_t w = (index % 2 == 0)
                                ? (std::uint64_t{b[0]} << 32 | b[1])
                                : (std::uint64_t{b[2]} << 32 | b[3]);
    return to_open_unit(w);
  }

  // Standard normal via Box-Muller, two per block.
  double normal(std::uint64_t stream, std::uint64_t index) const {
    const auto b = block(stream, index / 2);
    const double u1 = to_open_unit(std::uint64_t{b[0]} << 32 | b[1]);
    const double u2 = to_open_unit(std::uint64_t{b[2]} << 32 | b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    return (index % 2 == 0) ? r * std::cos(ang) : r * std::sin(ang);
  }

 private:
  static std::uint32_t lo(std::uint64_t x) {
    return static_cast<std::uint32_t>(x);
  }
  static std::uint32_t hi(std::uint64_t x) {
    return static_cast<std::uint32_t>(x >> 32);
  }
  static double to_open_unit(std::uint64_t w) {
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
};

}  // namespace bsde
