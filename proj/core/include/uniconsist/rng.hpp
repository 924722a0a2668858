#pragma once

#include <array>
#include <cstdint>

namespace uniconsist {

// Keyed random substream. The triple (seed, stream, replicate) is hashed into a
// xoshiro256** state, so any replicate can be regenerated on its own and the
// result does not depend on how replicates are spread over threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t replicate) noexcept;

  std::uint64_t next() noexcept;
  // Uniform on the open interval (0,1), 53 random bits.
  double uniform() noexcept;
  // Standard normal (Marsaglia polar method).
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x) noexcept;
// Stable 64-bit key for a short label, used to derive stream ids.
std::uint64_t stream_key(const char* label, std::uint64_t extra = 0) noexcept;

}  // namespace uniconsist
