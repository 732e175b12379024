#pragma once

#include <span>
#include <vector>

namespace stochlab::spectral {

/// Derivative of the given order of periodic samples on [0, 1), computed by
/// FFT. The Nyquist mode is dropped for odd orders.
std::vector<double> derivative(std::span<const double> samples, int order);

}  // namespace stochlab::spectral
