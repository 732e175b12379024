#include "stochlab/mollify.hpp"

#include <algorithm>
#include <cmath>

#include "stochlab/error.hpp"

namespace stochlab {

GridFunction::GridFunction(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.steps() + 1) throw GridMismatch("grid function needs N + 1 values");
  for (double x : values)
    if (!std::isfinite(x)) throw ConfigError("grid function values must be finite");
}

double inner(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid == g.grid)) throw GridMismatch("inner product of functions on different grids");
  const std::size_t n = f.grid.steps();
  double s = 0.5 * (f.values[0] * g.values[0] + f.values[n] * g.values[n]);
  for (std::size_t j = 1; j < n; ++j) s += f.values[j] * g.values[j];
  return s * f.grid.dt();
}

double lr_norm(const GridFunction& f, double r) {
  const std::size_t n = f.grid.steps();
  const auto p = [r](double x) { return std::pow(std::abs(x), r); };
  double s = 0.5 * (p(f.values[0]) + p(f.values[n]));
  for (std::size_t j = 1; j < n; ++j) s += p(f.values[j]);
  return std::pow(s * f.grid.dt(), 1.0 / r);
}

double MollifierKernel::base(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u))) / normalization();
}

double MollifierKernel::base_derivative(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double q = u * (1.0 - u);
  return base(u) * (1.0 - 2.0 * u) / (q * q);
}

double MollifierKernel::normalization() {
  // Trapezoid on a C-infinity function vanishing with all derivatives at
  // both ends converges faster than any power of the step.
  static const double z = [] {
    constexpr std::size_t n = 20000;
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const double u = static_cast<double>(i) / n;
      s += std::exp(-1.0 / (u * (1.0 - u)));
    }
    return s / n;
  }();
  return z;
}

MollifierKernel::MollifierKernel(double rho) : rho_(rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("mollifier width must be positive");
}

double MollifierKernel::operator()(double t) const { return base(t / rho_) / rho_; }

double MollifierKernel::derivative(double t) const { return base_derivative(t / rho_) / (rho_ * rho_); }

double MollifierKernel::mass(double delta, std::size_t resolution) const {
  const double upper = std::min(delta, rho_);
  if (upper <= 0.0) return 0.0;
  const std::size_t n = resolution + resolution % 2;
  const double h = upper / static_cast<double>(n);
  double s = (*this)(0.0) + (*this)(upper);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * (*this)(h * static_cast<double>(i));
  return s * h / 3.0;
}

double MollifierKernel::derivative_l1(std::size_t resolution) const {
  const double h = rho_ / static_cast<double>(resolution);
  double s = 0.0;
  for (std::size_t i = 1; i < resolution; ++i) s += std::abs(derivative(h * static_cast<double>(i)));
  return s * h;
}

namespace {

// Kernel (or kernel derivative) samples K_m = K(m dt), m = 0..M, M the last
// index inside the support.
std::vector<double> kernel_table(const MollifierKernel& k, const TimeGrid& grid, bool derivative) {
  const double dt = grid.dt();
  if (k.rho() < 4.0 * dt * (1.0 - 1e-12))
    throw ConfigError("mollifier width " + std::to_string(k.rho()) + " is below 4 grid steps");
  const auto m = static_cast<std::size_t>(std::ceil(k.rho() / dt));
  std::vector<double> table(std::min(m, grid.steps()) + 1);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double t = dt * static_cast<double>(i);
    table[i] = derivative ? k.derivative(t) : k(t);
  }
  return table;
}

// out_i = dt * sum_{j <= i} c_j K_{i-j} f_j, c_0 = 1/2, c_j = 1 otherwise.
void causal(std::span<const double> table, std::span<const double> f, std::span<double> out, double dt,
            std::size_t stride) {
  const std::size_t count = out.size() / stride;
  const std::size_t reach = table.size() - 1;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t c = 0; c < stride; ++c) {
      double s = 0.0;
      const std::size_t lo = i > reach ? i - reach : 0;
      for (std::size_t j = lo; j < i; ++j) s += (j == 0 ? 0.5 : 1.0) * table[i - j] * f[j * stride + c];
      out[i * stride + c] = s * dt;
    }
}

// out_j = dt * sum_{i >= j} w_i K_{i-j} g_i, w_N = 1/2, w_i = 1 otherwise.
void anticausal(std::span<const double> table, std::span<const double> g, std::span<double> out, double dt) {
  const std::size_t n = g.size() - 1;
  const std::size_t reach = table.size() - 1;
  for (std::size_t j = 0; j <= n; ++j) {
    double s = 0.0;
    const std::size_t hi = std::min(n, j + reach);
    for (std::size_t i = j + 1; i <= hi; ++i) s += (i == n ? 0.5 : 1.0) * table[i - j] * g[i];
    out[j] = s * dt;
  }
}

}  // namespace

GridFunction mollify(const MollifierKernel& k, const GridFunction& f) {
  const auto table = kernel_table(k, f.grid, false);
  std::vector<double> out(f.values.size());
  causal(table, f.values, out, f.grid.dt(), 1);
  return {f.grid, std::move(out)};
}

GridFunction adjoint_mollify(const MollifierKernel& k, const GridFunction& g) {
  const auto table = kernel_table(k, g.grid, false);
  std::vector<double> out(g.values.size());
  anticausal(table, g.values, out, g.grid.dt());
  return {g.grid, std::move(out)};
}

GridFunction mollify_derivative(const MollifierKernel& k, const GridFunction& f) {
  const auto table = kernel_table(k, f.grid, true);
  std::vector<double> out(f.values.size());
  causal(table, f.values, out, f.grid.dt(), 1);
  return {f.grid, std::move(out)};
}

GridFunction adjoint_mollify_derivative(const MollifierKernel& k, const GridFunction& g) {
  const auto table = kernel_table(k, g.grid, true);
  std::vector<double> out(g.values.size());
  anticausal(table, g.values, out, g.grid.dt());
  for (double& x : out) x = -x;
  return {g.grid, std::move(out)};
}

AdaptedProcess mollify(const MollifierKernel& k, const AdaptedProcess& v) {
  const auto table = kernel_table(k, v.grid(), false);
  const std::size_t width = v.shape().node_size();
  std::vector<double> out(v.values().size());
  causal(table, v.values(), out, v.grid().dt(), width);
  const std::size_t reach = table.size() - 1;
  std::vector<long> revealed(v.nodes(), -1);
  for (std::size_t i = 0; i < v.nodes(); ++i) {
    const std::size_t lo = i > reach ? i - reach : 0;
    for (std::size_t j = lo; j < i; ++j) revealed[i] = std::max(revealed[i], v.revealed(j));
  }
  return {v.grid(), v.shape(), std::move(out), std::move(revealed), v.sources()};
}

}  // namespace stochlab
