#pragma once

#include <cstdint>
#include <random>

namespace arw {

// splitmix64 finalizer applied to (state + golden gamma).
std::uint64_t mix64(std::uint64_t x);

// Stream seed for one (master seed, level, replication, purpose) tuple:
//   s = mix64(master); s = mix64(s ^ n); s = mix64(s ^ rep); s = mix64(s ^ tag)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t rep,
                          std::uint64_t tag);

enum StreamTag : std::uint64_t {
  kTagWave = 1,
  kTagLimitLaw = 2,
  kTagKacRice = 3,
  kTagAlpha = 4,
  kTagMisc = 5,
};

// mt19937_64 with Box-Muller normals, so the stream is fully specified
// and does not depend on the standard library's distribution code.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t n, std::uint64_t rep, std::uint64_t tag)
      : engine_(derive_seed(master, n, rep, tag)) {}

  // Uniform on (0, 1), 53 random bits.
  double uniform();
  double normal();
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace arw
