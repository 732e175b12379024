#include "stochlab/translation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochlab/error.hpp"
#include "stochlab/stats.hpp"

namespace stochlab {

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t paths)
    : grid_(grid), paths_(paths), values_(paths * (grid.steps() + 1), 0.0) {}

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t paths, std::vector<double> values)
    : grid_(grid), paths_(paths), values_(std::move(values)) {
  if (values_.size() != paths_ * nodes()) throw GridMismatch("path ensemble needs paths * (N + 1) values");
}

namespace {

constexpr double zero_modulus = 1e-12;

}  // namespace

LagModulus translation_modulus(const PathEnsemble& f, double h) {
  if (f.paths() == 0) throw ConfigError("translation modulus of an empty ensemble");
  const double dt = f.grid().dt();
  const double horizon = f.grid().horizon();
  if (!(h > 0.0) || !(h < horizon)) throw ConfigError("lag must lie in (0, T)");
  LagModulus out;
  out.requested = h;
  out.shift = static_cast<std::size_t>(std::floor(h / dt * (1.0 + 1e-12)));
  if (out.shift == 0) throw ConfigError("lag " + std::to_string(h) + " is shorter than one time step");
  out.lag = static_cast<double>(out.shift) * dt;
  out.snapped = std::abs(out.lag - h) > 1e-12 * horizon;

  const std::size_t n = f.grid().steps();
  const std::size_t m = out.shift;
  std::vector<double> per_path(f.paths());
  std::vector<double> terms(n - m + 1);
  for (std::size_t p = 0; p < f.paths(); ++p) {
    const auto x = f.path(p);
    for (std::size_t j = m; j <= n; ++j) {
      const double w = (j == m || j == n) ? 0.5 : 1.0;
      terms[j - m] = w * std::abs(x[j] - x[j - m]);
    }
    per_path[p] = pairwise_sum(terms) * dt;
  }
  const auto est = estimate_mean(per_path);
  out.value = est.mean;
  out.stderr_ = est.stderr_;
  return out;
}

double TranslationFit::uniformity() const {
  double worst = 1.0;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    if (max_over_n[l] <= zero_modulus) continue;
    worst = std::max(worst, min_over_n[l] > 0.0 ? max_over_n[l] / min_over_n[l]
                                                : std::numeric_limits<double>::infinity());
  }
  return worst;
}

double TranslationFit::min_slope() const {
  double s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < slope.size(); ++i)
    if (!exact[i]) s = std::min(s, slope[i]);
  return s;
}

TranslationFit fit_translation_rate(std::span<const PathEnsemble> families, std::span<const double> lags) {
  if (lags.size() < 4) throw ConfigError("translation fit needs at least 4 lags");
  const auto [lo, hi] = std::minmax_element(lags.begin(), lags.end());
  if (!(*lo > 0.0) || std::log2(*hi / *lo) < 3.0 - 1e-9)
    throw ConfigError("translation lags must span at least 3 octaves");
  if (families.empty()) throw ConfigError("translation fit needs at least one family");

  TranslationFit fit;
  fit.lags.assign(lags.begin(), lags.end());
  fit.max_over_n.assign(lags.size(), 0.0);
  fit.min_over_n.assign(lags.size(), std::numeric_limits<double>::infinity());
  for (const auto& family : families) {
    std::vector<LagModulus> row;
    std::vector<double> x, y;
    bool all_zero = true;
    for (std::size_t l = 0; l < lags.size(); ++l) {
      row.push_back(translation_modulus(family, lags[l]));
      const auto& m = row.back();
      fit.snapped = fit.snapped || m.snapped;
      fit.max_over_n[l] = std::max(fit.max_over_n[l], m.value);
      fit.min_over_n[l] = std::min(fit.min_over_n[l], m.value);
      if (m.value > zero_modulus) {
        all_zero = false;
        x.push_back(std::log(m.lag));
        y.push_back(std::log(m.value));
      }
    }
    fit.exact.push_back(all_zero);
    if (all_zero || x.size() < 2)
      fit.slope.push_back(std::numeric_limits<double>::quiet_NaN());
    else
      fit.slope.push_back(fit_line(x, y).slope);
    fit.moduli.push_back(std::move(row));
  }
  return fit;
}

}  // namespace stochlab
