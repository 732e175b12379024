#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stochlab/process.hpp"
#include "stochlab/wiener.hpp"

namespace stochlab {

/// Left-point sum  sum_{j < upto} V(t_j) (W(t_{j+1}) - W(t_j))  for an
/// m x k matrix (or scalar, k = 1) integrand. Throws PredictabilityError if
/// any node reads randomness from its future.
std::vector<double> ito_integral(const AdaptedProcess& v, const WienerPath& w, std::size_t upto);
std::vector<double> ito_integral(const AdaptedProcess& v, const WienerPath& w);

/// Running integral at every node 0..N (m values per node).
std::vector<double> ito_path(const AdaptedProcess& v, const WienerPath& w);

/// sum_j |V(t_j)|^2 dt over the left nodes.
double quadratic_integral(const AdaptedProcess& v);

struct IsometrySample {
  AdaptedProcess v;
  WienerPath w;
};

struct IsometryResidual {
  double lhs = 0.0;  // E |int V dW|^2
  double rhs = 0.0;  // E int |V|^2 dt
  double lhs_stderr = 0.0;
  double z = 0.0;    // (lhs - rhs) / stderr of the paired difference
  std::size_t samples = 0;
};

/// Monte Carlo check of E|int V dW|^2 = E int |V|^2 dt. Needs >= 100 samples.
IsometryResidual isometry_residual(const std::function<IsometrySample(std::size_t replica)>& generate,
                                   std::size_t samples);

}  // namespace stochlab
