#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochlab/process.hpp"
#include "stochlab/wiener.hpp"

namespace stochlab {

/// Function sampled at all nodes t_0..t_N of a time grid.
struct GridFunction {
  TimeGrid grid;
  std::vector<double> values;

  GridFunction(TimeGrid g, std::vector<double> v);
  template <class F>
  static GridFunction sample(const TimeGrid& g, F&& f) {
    std::vector<double> v(g.steps() + 1);
    for (std::size_t j = 0; j <= g.steps(); ++j) v[j] = f(g.time(j));
    return {g, std::move(v)};
  }
};

/// Trapezoid-rule inner product and L^r norm on [0, T].
double inner(const GridFunction& f, const GridFunction& g);
double lr_norm(const GridFunction& f, double r);

/// One-sided kernel R_rho(t) = R(t / rho) / rho built on the C-infinity bump
/// R(u) = exp(-1 / (u (1 - u))) / Z, supported in (0, 1), unit mass.
class MollifierKernel {
 public:
  explicit MollifierKernel(double rho);

  double rho() const noexcept { return rho_; }
  double operator()(double t) const;
  double derivative(double t) const;

  static double base(double u);
  static double base_derivative(double u);
  static double normalization();

  /// int_0^delta R_rho(t) dt by composite Simpson quadrature.
  double mass(double delta, std::size_t resolution = 4096) const;
  /// ||d/dt R_rho||_{L^1}, the operator-norm bound of the derivative operator.
  double derivative_l1(std::size_t resolution = 8192) const;

 private:
  double rho_;
};

/// Causal R_rho f(t) = int_0^t R_rho(t - s) f(s) ds (trapezoid quadrature).
/// Rejects kernels narrower than 4 grid steps.
GridFunction mollify(const MollifierKernel& k, const GridFunction& f);
/// Anti-causal R~_rho g(s) = int_s^T R_rho(t - s) g(t) dt, the exact discrete adjoint of mollify.
GridFunction adjoint_mollify(const MollifierKernel& k, const GridFunction& g);
/// d/dt R_rho f, convolution with the differentiated kernel.
GridFunction mollify_derivative(const MollifierKernel& k, const GridFunction& f);
/// d/ds R~_rho g = -int_s^T R_rho'(t - s) g(t) dt.
GridFunction adjoint_mollify_derivative(const MollifierKernel& k, const GridFunction& g);

/// Component-wise causal mollification of a process on its left nodes. The
/// kernel vanishes at 0, so node i only reads nodes j < i: predictability is
/// preserved.
AdaptedProcess mollify(const MollifierKernel& k, const AdaptedProcess& v);

}  // namespace stochlab
