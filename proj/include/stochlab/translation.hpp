#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochlab/wiener.hpp"

namespace stochlab {

/// Scalar paths F(t_0..t_N) of an ensemble, stored flat.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t paths);
  PathEnsemble(TimeGrid grid, std::size_t paths, std::vector<double> values);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t paths() const noexcept { return paths_; }
  std::size_t nodes() const noexcept { return grid_.steps() + 1; }
  std::span<double> path(std::size_t i) { return {values_.data() + i * nodes(), nodes()}; }
  std::span<const double> path(std::size_t i) const { return {values_.data() + i * nodes(), nodes()}; }

 private:
  TimeGrid grid_;
  std::size_t paths_;
  std::vector<double> values_;
};

struct LagModulus {
  double requested = 0.0;
  double lag = 0.0;  // grid-aligned lag actually used
  std::size_t shift = 0;
  bool snapped = false;
  double value = 0.0;
  double stderr_ = 0.0;
};

/// E int_h^T |F(t) - F(t - h)| dt with trapezoid quadrature in t. Lags off
/// the grid are snapped down to the nearest multiple of dt and flagged.
LagModulus translation_modulus(const PathEnsemble& f, double h);

struct TranslationFit {
  std::vector<double> lags;
  std::vector<std::vector<LagModulus>> moduli;  // [family n][lag]
  std::vector<double> slope;                    // per n; NaN when exact
  std::vector<bool> exact;                      // all moduli vanish: no fit
  std::vector<double> max_over_n;
  std::vector<double> min_over_n;
  bool snapped = false;

  /// Largest max/min ratio over lags (1 when every family is exact).
  double uniformity() const;
  /// Smallest fitted slope over the non-exact families (+inf if none).
  double min_slope() const;
};

/// Log-log least-squares slope of the modulus per family. Needs at least
/// 4 lags spanning 3 octaves.
TranslationFit fit_translation_rate(std::span<const PathEnsemble> families, std::span<const double> lags);

}  // namespace stochlab
