#ifndef RSHD_RNG_HPP
#define RSHD_RNG_HPP

#include <cstdint>
#include <random>

namespace rshd {

// Splittable deterministic random stream. A stream is a value (a 64-bit key);
// engine() always yields the same generator for the same key, so any routine
// taking an RngStream is pure, and re-running it with the same stream is
// bit-identical. Child streams derived via substream(i) are statistically
// independent for distinct i (SplitMix64 finalizer over the combined key).
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : key_(mix(seed)) {}

  RngStream substream(std::uint64_t index) const {
    return RngStream(raw(mix(key_ + 0x9e3779b97f4a7c15ull * (index + 1))));
  }

  std::mt19937_64 engine() const { return std::mt19937_64(key_); }

  std::uint64_t key() const { return key_; }

private:
  struct raw {
    std::uint64_t v;
    explicit raw(std::uint64_t v) : v(v) {}
  };
  explicit RngStream(raw r) : key_(r.v) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

} // namespace rshd

#endif
