#include "stochlab/ito.hpp"

#include <cmath>

#include "stochlab/error.hpp"
#include "stochlab/parallel.hpp"

namespace stochlab {

namespace {

void check_integrand(const AdaptedProcess& v, const WienerPath& w, std::size_t upto) {
  if (!(v.grid() == w.grid())) throw GridMismatch("integrand and Wiener path use different grids");
  const auto& s = v.shape();
  if (s.kind == ProcessShape::Kind::field) throw GridMismatch("Ito integral needs a matrix or scalar integrand");
  if (s.cols != w.dim())
    throw GridMismatch("integrand has " + std::to_string(s.cols) + " columns, Wiener path dimension " +
                       std::to_string(w.dim()));
  if (upto > v.nodes()) throw ConfigError("Ito integral upper node beyond the grid");
  const std::size_t bad = v.first_violation();
  if (bad < upto) throw PredictabilityError(bad, v.revealed(bad));
}

}  // namespace

std::vector<double> ito_integral(const AdaptedProcess& v, const WienerPath& w, std::size_t upto) {
  check_integrand(v, w, upto);
  const std::size_t m = v.shape().rows;
  const std::size_t k = v.shape().cols;
  std::vector<double> sum(m, 0.0);
  for (std::size_t j = 0; j < upto; ++j) {
    const auto node = v.node(j);
    for (std::size_t c = 0; c < k; ++c) {
      const double dw = w.increment(j, c);
      for (std::size_t r = 0; r < m; ++r) sum[r] += node[r * k + c] * dw;
    }
  }
  return sum;
}

std::vector<double> ito_integral(const AdaptedProcess& v, const WienerPath& w) {
  return ito_integral(v, w, v.nodes());
}

std::vector<double> ito_path(const AdaptedProcess& v, const WienerPath& w) {
  check_integrand(v, w, v.nodes());
  const std::size_t m = v.shape().rows;
  const std::size_t k = v.shape().cols;
  std::vector<double> path((v.nodes() + 1) * m, 0.0);
  for (std::size_t j = 0; j < v.nodes(); ++j) {
    const auto node = v.node(j);
    for (std::size_t r = 0; r < m; ++r) {
      double inc = 0.0;
      for (std::size_t c = 0; c < k; ++c) inc += node[r * k + c] * w.increment(j, c);
      path[(j + 1) * m + r] = path[j * m + r] + inc;
    }
  }
  return path;
}

double quadratic_integral(const AdaptedProcess& v) {
  double s = 0.0;
  for (double x : v.values()) s += x * x;
  return s * v.grid().dt();
}

IsometryResidual isometry_residual(const std::function<IsometrySample(std::size_t)>& generate,
                                   std::size_t samples) {
  if (samples < 100) throw ConfigError("isometry check needs at least 100 samples");
  // columns: |I|^2, int |V|^2 dt, difference
  const auto table = parallel::map_replicas(samples, 3, [&](std::size_t r, std::span<double> out) {
    const auto s = generate(r);
    const auto integral = ito_integral(s.v, s.w);
    double sq = 0.0;
    for (double x : integral) sq += x * x;
    out[0] = sq;
    out[1] = quadratic_integral(s.v);
    out[2] = out[0] - out[1];
  });
  IsometryResidual res;
  res.samples = samples;
  const auto lhs = table.mean(0);
  const auto diff = table.mean(2);
  res.lhs = lhs.mean;
  res.lhs_stderr = lhs.stderr_;
  res.rhs = table.mean(1).mean;
  res.z = diff.stderr_ > 0.0 ? diff.mean / diff.stderr_ : 0.0;
  return res;
}

}  // namespace stochlab
