#include "stochlab/rng.hpp"

namespace stochlab {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

namespace {

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t replica, Channel channel) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ replica);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(channel) + 0x51ed2701ULL));
  return h;
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t replica, Channel channel)
    : engine_(stream_key(seed, replica, channel)) {}

double omega0(std::uint64_t seed, std::uint64_t replica) {
  Stream s(seed, replica, Channel::initial);
  return s.uniform();
}

double amplitude(std::uint64_t seed, std::uint64_t replica) {
  Stream s(seed, replica, Channel::amplitude);
  return s.normal();
}

}  // namespace stochlab
