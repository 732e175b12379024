#pragma once

#include <cstdint>
#include <random>

namespace stochlab {

/// Independent randomness sources inside one replica.
enum class Channel : std::uint64_t {
  driving = 0,    // W
  auxiliary = 1,  // B, the coupling partner of W
  initial = 2,    // omega_0, the F_0-measurable uniform variable
  amplitude = 3,  // Z, F_0-measurable Gaussian amplitudes
  data = 4,       // random initial data of the SPDE solvers
  pairs = 5,      // random test pairs in deterministic calculus checks
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// One random stream keyed by (seed, replica, channel). Streams with
/// different keys are independent; the same key always reproduces the
/// same sequence, regardless of which worker constructs it.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replica, Channel channel);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// omega_0 of a replica: uniform on [0,1), drawn from Channel::initial.
double omega0(std::uint64_t seed, std::uint64_t replica);

/// Standard Gaussian Z of a replica, drawn from Channel::amplitude.
double amplitude(std::uint64_t seed, std::uint64_t replica);

}  // namespace stochlab
