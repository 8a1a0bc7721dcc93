#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace memhtm {

namespace detail {

// Finalizer from the splitmix64 generator. Bijective on 64-bit words, which
// keeps distinct (stream, counter) inputs from colliding after mixing.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix_key(std::uint64_t h, std::uint64_t v) noexcept {
  return splitmix64(h ^ (splitmix64(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
}

}  // namespace detail

// Counter-based random stream. A draw is a pure function of
// (seed, stream_id, draw_index), so any unit of work that owns its own
// stream produces the same sequence no matter how work is scheduled or
// how many threads run beside it. Simulation code hands one stream to
// each independently seeded object (a pooler column, a device, an image).
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed),
        stream_(stream_id),
        key_(detail::mix_key(detail::splitmix64(seed), stream_id)) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  std::uint64_t draw_count() const noexcept { return counter_; }

  // Derived stream with an independent sequence. Children of distinct
  // (salt_a, salt_b) pairs never share draws with each other or the parent.
  RngStream substream(std::uint64_t salt_a, std::uint64_t salt_b = 0) const noexcept {
    return RngStream(seed_, detail::mix_key(detail::mix_key(stream_, salt_a), salt_b));
  }

  std::uint64_t next_u64() noexcept {
    return detail::splitmix64(key_ + counter_++ * 0x9e3779b97f4a7c15ull);
  }

  // Uniform draw in [0, 1). 53 significant bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Always consumes exactly two uniform
  // draws, so the draw index stays a simple count.
  double gaussian() noexcept {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // log(0) guard; smallest representable draw
    const double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream id salts for the major simulation domains. Substreams derived with
// different salts are disjoint even when their inner indices collide.
namespace stream_domain {
inline constexpr std::uint64_t potential = 0x01;
inline constexpr std::uint64_t permanence = 0x02;
inline constexpr std::uint64_t segments = 0x03;
inline constexpr std::uint64_t weight_bank = 0x04;
inline constexpr std::uint64_t programming = 0x05;
inline constexpr std::uint64_t encode_noise = 0x06;
inline constexpr std::uint64_t template_store = 0x07;
inline constexpr std::uint64_t dataset = 0x08;
}  // namespace stream_domain

}  // namespace memhtm
