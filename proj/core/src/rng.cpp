#include "uniconsist/rng.hpp"

#include <cmath>

namespace uniconsist {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(const char* label, std::uint64_t extra) noexcept {
  // FNV-1a over the label, then mixed with the extra word.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = label; *p != '\0'; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ mix64(extra + kGolden));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t replicate) noexcept {
  std::uint64_t key = mix64(seed + kGolden);
  key = mix64(key ^ mix64(stream + 2 * kGolden));
  key = mix64(key ^ mix64(replicate + 3 * kGolden));
  std::uint64_t x = key;
  for (auto& w : s_) {
    x += kGolden;
    w = mix64(x);
  }
}

std::uint64_t RngStream::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace uniconsist
