#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stochlab/rng.hpp"

namespace stochlab {

/// Uniform grid t_j = j T / N on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  double time(std::size_t j) const noexcept {
    return j == steps_ ? horizon_ : horizon_ * static_cast<double>(j) / static_cast<double>(steps_);
  }

  /// The grid with every `factor`-th node of this one.
  TimeGrid coarsened(std::size_t factor) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  std::size_t steps_;
};

/// A k-dimensional Brownian path sampled at the grid nodes, W(0) = 0.
class WienerPath {
 public:
  /// `values` holds (steps + 1) * dim entries, node-major.
  WienerPath(TimeGrid grid, std::size_t dim, std::vector<double> values, std::uint64_t seed = 0,
             std::uint64_t replica = 0);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replica() const noexcept { return replica_; }

  std::span<const double> at(std::size_t node) const { return {values_.data() + node * dim_, dim_}; }
  double at(std::size_t node, std::size_t c) const { return values_[node * dim_ + c]; }
  /// W(t_{j+1}) - W(t_j), component c.
  double increment(std::size_t j, std::size_t c) const {
    return values_[(j + 1) * dim_ + c] - values_[j * dim_ + c];
  }
  std::span<const double> values() const noexcept { return values_; }

  /// Path restricted to every `factor`-th node (exact Brownian subsampling).
  WienerPath restricted(std::size_t factor) const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
  std::uint64_t seed_;
  std::uint64_t replica_;
};

/// Brownian path with i.i.d. N(0, dt) increments per component.
WienerPath sample_wiener(const TimeGrid& grid, std::size_t dim, std::uint64_t seed,
                         std::uint64_t replica, Channel channel = Channel::driving);

/// W_n = (W + a B) / sqrt(1 + a^2). Wiener in law for every a >= 0 and
/// pathwise convergent to W as a -> 0. Keeps the identifiers of W.
WienerPath couple(const WienerPath& w, const WienerPath& b, double a);

/// Max over grid nodes of the Euclidean distance between the two paths.
double sup_distance(const WienerPath& w1, const WienerPath& w2);

/// Mixing coefficients a_n = scale / n (scale = 0 gives the identity coupling).
struct CouplingSchedule {
  double scale = 1.0;
  double coefficient(std::size_t n) const { return scale / static_cast<double>(n); }
  bool identity() const noexcept { return scale == 0.0; }
};

}  // namespace stochlab
