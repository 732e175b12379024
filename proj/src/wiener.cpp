#include "stochlab/wiener.hpp"

#include <cmath>
#include <string>

#include "stochlab/error.hpp"

namespace stochlab {

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
  if (steps == 0) throw ConfigError("time grid needs at least one step");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time horizon must be positive");
}

TimeGrid TimeGrid::coarsened(std::size_t factor) const {
  if (factor == 0 || steps_ % factor != 0)
    throw GridMismatch("coarsening factor " + std::to_string(factor) + " does not divide " +
                       std::to_string(steps_) + " steps");
  return {horizon_, steps_ / factor};
}

WienerPath::WienerPath(TimeGrid grid, std::size_t dim, std::vector<double> values, std::uint64_t seed,
                       std::uint64_t replica)
    : grid_(grid), dim_(dim), values_(std::move(values)), seed_(seed), replica_(replica) {
  if (dim_ == 0) throw ConfigError("Wiener path dimension must be positive");
  if (values_.size() != (grid_.steps() + 1) * dim_)
    throw GridMismatch("Wiener path value count does not match grid and dimension");
  for (std::size_t c = 0; c < dim_; ++c)
    if (values_[c] != 0.0) throw ConfigError("Wiener path must start at 0");
}

WienerPath WienerPath::restricted(std::size_t factor) const {
  const TimeGrid coarse = grid_.coarsened(factor);
  std::vector<double> v((coarse.steps() + 1) * dim_);
  for (std::size_t j = 0; j <= coarse.steps(); ++j)
    for (std::size_t c = 0; c < dim_; ++c) v[j * dim_ + c] = values_[j * factor * dim_ + c];
  return {coarse, dim_, std::move(v), seed_, replica_};
}

WienerPath sample_wiener(const TimeGrid& grid, std::size_t dim, std::uint64_t seed,
                         std::uint64_t replica, Channel channel) {
  if (dim == 0) throw ConfigError("Wiener path dimension must be positive");
  Stream stream(seed, replica, channel);
  const double sd = std::sqrt(grid.dt());
  std::vector<double> v((grid.steps() + 1) * dim, 0.0);
  for (std::size_t j = 1; j <= grid.steps(); ++j)
    for (std::size_t c = 0; c < dim; ++c) v[j * dim + c] = v[(j - 1) * dim + c] + sd * stream.normal();
  return {grid, dim, std::move(v), seed, replica};
}

namespace {

void require_compatible(const WienerPath& a, const WienerPath& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("Wiener paths live on different time grids");
  if (a.dim() != b.dim()) throw GridMismatch("Wiener paths have different dimensions");
}

}  // namespace

WienerPath couple(const WienerPath& w, const WienerPath& b, double a) {
  require_compatible(w, b);
  if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("coupling coefficient must be >= 0");
  if (a == 0.0) return w;
  const double scale = 1.0 / std::sqrt(1.0 + a * a);
  const auto wv = w.values();
  const auto bv = b.values();
  std::vector<double> v(wv.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (wv[i] + a * bv[i]) * scale;
  return {w.grid(), w.dim(), std::move(v), w.seed(), w.replica()};
}

double sup_distance(const WienerPath& w1, const WienerPath& w2) {
  require_compatible(w1, w2);
  double best = 0.0;
  for (std::size_t j = 0; j <= w1.grid().steps(); ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < w1.dim(); ++c) {
      const double d = w1.at(j, c) - w2.at(j, c);
      s += d * d;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

}  // namespace stochlab
