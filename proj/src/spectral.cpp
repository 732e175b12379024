#include "stochlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace stochlab::spectral {

namespace {
std::mutex planner_mutex;
}

std::vector<double> derivative(std::span<const double> samples, int order) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw std::invalid_argument("spectral derivative needs >= 2 samples");
  if (order < 0) throw std::invalid_argument("negative derivative order");
  std::vector<double> in(samples.begin(), samples.end());
  std::vector<double> out(samples.size());
  const int modes = n / 2 + 1;
  auto* spectrum = fftw_alloc_complex(static_cast<std::size_t>(modes));
  fftw_plan forward{};
  fftw_plan backward{};
  {
    std::lock_guard lock(planner_mutex);
    forward = fftw_plan_dft_r2c_1d(n, in.data(), spectrum, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(n, spectrum, out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(forward);
  for (int k = 0; k < modes; ++k) {
    std::complex<double> c(spectrum[k][0], spectrum[k][1]);
    if (order % 2 == 1 && n % 2 == 0 && k == n / 2) {
      c = 0.0;
    } else {
      c *= std::pow(std::complex<double>(0.0, 2.0 * std::numbers::pi * k), order);
    }
    spectrum[k][0] = c.real() / n;
    spectrum[k][1] = c.imag() / n;
  }
  fftw_execute(backward);
  {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  fftw_free(spectrum);
  return out;
}

}  // namespace stochlab::spectral
