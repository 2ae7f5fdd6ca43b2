#include "fbmdrift/rng.h"

#include <cmath>
#include <numbers>

namespace fbmdrift {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  for (std::uint64_t c : coords) {
    state ^= c + 0x632be59bd9b4e019ULL + (key << 6) + (key >> 2);
    key = splitmix64(state);
  }
  return key;
}

NormalStream::NormalStream(std::uint64_t key) : engine_(key) {}

// Marsaglia polar method. Written out rather than std::normal_distribution so
// that the variate sequence does not depend on the standard library vendor.
double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  double u, v, s;
  do {
    u = 2.0 * static_cast<double>(engine_() >> 11) * scale - 1.0;
    v = 2.0 * static_cast<double>(engine_() >> 11) * scale - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

}  // namespace fbmdrift
