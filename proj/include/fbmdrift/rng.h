#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fbmdrift {

// Mixes a base seed with a tuple of stream coordinates (path index,
// replicate, ...) into a 64-bit key. Streams with distinct coordinates are
// statistically independent, and a stream's content never depends on how
// many other streams were drawn before it.
std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);

// Standard normal variates from a keyed stream.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key);
  double operator()();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fbmdrift
