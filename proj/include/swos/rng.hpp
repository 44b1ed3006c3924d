#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace swos {

// Counter-style random stream. A stream is identified by (seed, stream_id);
// the generated sequence is a pure function of that pair, so replicas can be
// farmed out to any number of workers and still reproduce bit-identically.
//
// Substream convention used across the solver: stream_id = (path << 32) | slot,
// where slot 0 carries the jump draws of a path and slot n >= 1 carries the
// occupation-measure draws of step n.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    // decorrelate (seed, stream_id) into a start state with two mix rounds
    state_ = mix(seed ^ 0x9E3779B97F4A7C15ull);
    state_ = mix(state_ ^ mix(stream_id));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // uniform in [0,1)
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0,1); the zero draw is a probability ~2^-53 event, redrawn
  double next_open() {
    for (;;) {
      double u = next_unit();
      if (u > 0.0) return u;
    }
  }

  // standard normal, Box-Muller with a cached spare
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_open();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stream for a given (path, slot) pair under a base stream. The base's own
// stream_id is folded into the path index so nested derivations stay disjoint.
inline RngStream substream(const RngStream& base, std::uint64_t path,
                           std::uint32_t slot) {
  std::uint64_t p = path ^ (base.stream_id() * 0x9E3779B97F4A7C15ull);
  return RngStream(base.seed(), (p << 32) | slot);
}

} // namespace swos
