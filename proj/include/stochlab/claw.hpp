#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stochlab/convergence.hpp"
#include "stochlab/process.hpp"
#include "stochlab/torus.hpp"
#include "stochlab/translation.hpp"
#include "stochlab/transport.hpp"
#include "stochlab/wiener.hpp"

namespace stochlab {

struct FluxFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
};

/// burgers u^2/2, cubic u^3/3, linear u; plus perturbation * u^3/3.
FluxFunction flux_family(const std::string& kind, double perturbation = 0.0);

/// Antiderivative H(u) = int_lo^u h on [lo, hi], tabulated with Simpson
/// panels and interpolated linearly. Monotone whenever h has a sign.
class Primitive {
 public:
  Primitive(const std::function<double(double)>& h, double lo, double hi, std::size_t intervals = 8192);
  double operator()(double u) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_, hi_, step_;
  std::vector<double> table_;
};

/// F_EO(a, b) = F(lo) + int_lo^a (F')^+ + int_lo^b (F')^-.
class EngquistOsherFlux {
 public:
  EngquistOsherFlux(const FluxFunction& flux, double lo, double hi, std::size_t intervals = 8192);
  double operator()(double a, double b) const { return base_ + plus_(a) + minus_(b); }

 private:
  double base_;
  Primitive plus_;
  Primitive minus_;
};

struct KineticWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// centre +- (range + 4 sd): twice the half range of u0 as margin plus 4 noise standard deviations.
KineticWindow kinetic_window(double u_min, double u_max, double noise_sd);

/// Midpoints of `levels` equal cells of [lo, hi].
std::vector<double> kappa_ladder(double lo, double hi, std::size_t levels);

/// du + F(u)_x dt = eps u_xx dt + sigma(u) dW on the 1D torus.
struct KineticProblem {
  TorusGrid grid{16};
  FluxFunction flux;
  std::size_t noise_dim = 1;
  std::function<void(double, std::span<double>)> sigma;             // empty means sigma = 0
  std::function<void(double, std::span<double>)> sigma_derivative;
  double viscosity = 0.0;
  std::function<double(double x, double omega0)> initial;
  KineticWindow window{-1.0, 1.0};
  std::size_t xi_bins = 256;
  std::vector<double> kappa;
  bool track_measure = true;

  /// Checks F' and sigma' against centred differences (1e-6) and the grid dimension.
  void validate() const;
  double max_speed() const;  // max |F'| over the window
};

/// Nonnegative defect measure accumulated over [0, T]: parabolic part on
/// (cell, xi-bin), numerical entropy dissipation on (cell, kappa level).
class KineticMeasure {
 public:
  KineticMeasure(std::size_t cells, KineticWindow window, std::size_t bins, std::vector<double> kappa);

  std::size_t cells() const noexcept { return cells_; }
  std::size_t bins() const noexcept { return bins_; }
  const std::vector<double>& kappa() const noexcept { return kappa_; }
  double bin_center(std::size_t l) const;
  double dkappa() const noexcept { return dkappa_; }
  std::vector<double>& parabolic() noexcept { return parabolic_; }
  std::vector<double>& entropy() noexcept { return entropy_; }
  const std::vector<double>& parabolic() const noexcept { return parabolic_; }
  const std::vector<double>& entropy() const noexcept { return entropy_; }
  std::vector<double>& mass_trace() noexcept { return trace_; }
  const std::vector<double>& mass_trace() const noexcept { return trace_; }

  void deposit_parabolic(std::size_t cell, double xi, double amount);
  double total_mass() const;
  double min_bin() const;
  /// Mass of the cells whose centres lie in [x_lo, x_hi].
  double mass_in(const TorusGrid& grid, double x_lo, double x_hi) const;
  /// sum_i a_i int g(xi) m(i, dxi).
  double pair(std::span<const double> a, const std::function<double(double)>& g) const;

 private:
  std::size_t cells_;
  KineticWindow window_;
  std::size_t bins_;
  std::vector<double> kappa_;
  double dkappa_;
  std::vector<double> parabolic_;
  std::vector<double> entropy_;
  std::vector<double> trace_;
};

struct ClawSolution {
  FieldPath u;
  KineticMeasure m;
};

/// Engquist-Osher flux, centred eps u_xx, Euler-Maruyama noise; the entropy
/// measure comes from the Kruzkov inequalities of the flux substep.
ClawSolution solve_claw(const KineticProblem& problem, const WienerPath& w, std::uint64_t seed, std::size_t replica,
                        SolveOptions options = {});

/// chi(t_j, x_i, xi_l) = 1{xi_l < u(t_j, x_i)} on the nodes xi_l = lo + l dxi, l = 0..bins.
class KineticField {
 public:
  KineticField(FieldPath u, KineticWindow window, std::size_t bins);

  std::size_t bins() const noexcept { return bins_; }
  double xi(std::size_t l) const;
  double dxi() const noexcept { return (window_.hi - window_.lo) / static_cast<double>(bins_); }
  int chi(std::size_t j, std::size_t i, std::size_t l) const { return xi(l) < u_.at(j)[i] ? 1 : 0; }
  const FieldPath& u() const noexcept { return u_; }
  /// sum_l chi dxi over nodes with a <= xi_l < b.
  double layer(std::size_t j, std::size_t i, double a, double b) const;
  /// 0 <= chi <= 1, monotone in xi, and layer-cake consistency at every snapshot (stride `every`).
  bool consistent(std::size_t every = 1) const;

 private:
  FieldPath u_;
  KineticWindow window_;
  std::size_t bins_;
};

/// Rejects values of u outside the window.
KineticField kinetic_function(const FieldPath& u, KineticWindow window, std::size_t bins);

/// Separable kinetic test function phi(x, xi) = a(x) b(xi) with b a smooth
/// bump supported in (centre - width, centre + width).
struct SeparableTest {
  TestFunction a;
  double centre = 0.0;
  double width = 1.0;
  double b(double xi) const;
  double db(double xi) const;
  double d2b(double xi) const;
};

SeparableTest bump_test(const TorusGrid& grid, double centre, double width);

/// <chi(t_j), phi> = sum_i a_i int_lo^{u_i} b dx.
double kinetic_pairing(const FieldPath& u, std::size_t j, const SeparableTest& phi, const Primitive& b_primitive);
/// <chi(t_j), d_xi(phi sigma_c)> = sum_i a_i b(u_i) sigma_c(u_i) dx.
double noise_pairing(std::span<const double> u, const SeparableTest& phi, const KineticProblem& problem,
                     std::size_t c);

/// Weak-form residual of the kinetic equation over [0, T] (every step stored):
/// [<chi, phi>]_0^T - int <chi, F' phi_x> - int <chi, d_xi(phi sigma)> dW
///   - 1/2 int <chi, d_xi(|sigma|^2 d_xi phi)> - eps int <chi, phi_xx> + <m, d_xi phi>.
double kinetic_residual(const ClawSolution& s, const KineticProblem& problem, const WienerPath& w,
                        const SeparableTest& phi);

/// F_n = F + (flux_perturbation / n) u^3/3, sigma_n = s sin(pi xi) + (noise_perturbation / n) sin(2 pi xi),
/// eps = viscosity_scale / n, u0 = 0.5 + 0.25 sin(2 pi x); n = 0 is the limit problem.
struct ClawFamily {
  std::string flux = "burgers";
  double flux_perturbation = 0.5;
  double noise_amplitude = 0.5;
  double noise_perturbation = 0.1;
  double viscosity_scale = 0.1;
  std::size_t xi_bins = 256;
  std::size_t kappa_levels = 17;

  KineticProblem problem(const TorusGrid& grid, std::size_t n, double horizon) const;
  SeparableTest test(const TorusGrid& grid) const;
};

struct KineticConfig {
  double horizon = 0.1;
  std::size_t cells = 128;
  std::size_t steps = 2048;
  std::vector<std::size_t> ns{2, 4, 8, 16};
  std::size_t refine = 4;
  CouplingSchedule coupling;
  Ensemble ensemble{1, 100};
  std::vector<TestVariable> ys = default_test_variables();
  double bounded_factor = 2.0;
};

struct KineticEntry {
  std::size_t n = 0;
  MeanEstimate chi_gap;        // E int <chi_n - chi, phi> dt
  GapStatistic stochastic_gap; // int <chi_n, d_xi(phi sigma_n)> dW_n vs the limit
  MeanEstimate mass;           // E m_n([0,T] x T x R)
  double min_bin = 0.0;
  double flux_distance = 0.0;  // sup |F_n' - F'| on the window
  double sigma_distance = 0.0; // sup |sigma_n - sigma| + sup |sigma_n' - sigma'|
  std::vector<MeanEstimate> mass_y;  // E[Y m_n]
};

struct KineticReport {
  std::vector<KineticEntry> entries;
  std::vector<std::string> monitor_failures;
  bool chi_consistent = true;
  TranslationFit translation;
  Trend trend;

  bool monitors_ok() const noexcept { return monitor_failures.empty(); }
};

KineticReport kinetic_stability_experiment(const ClawFamily& family, const KineticConfig& config,
                                           std::span<const double> lags);

/// Deterministic Burgers Riemann data u0 = 1 on [0.1, 0.5), 0 elsewhere:
/// a rarefaction fan from x = 0.1 and a shock from x = 0.5 with speed 1/2.
struct RiemannResult {
  std::size_t cells = 0;
  double dx = 0.0;
  double horizon = 0.0;
  double shock_position = 0.0;  // 0.5-crossing between fan head and x = 0.95
  double shock_speed = 0.0;
  double fan_mass = 0.0;        // entropy measure over cells in [0.05, 0.65]
  double total_mass = 0.0;
  double residual = 0.0;        // |kinetic weak residual| for the family test function
  double min_bin = 0.0;
  bool max_principle = true;    // 0 <= u <= 1 throughout
};

/// kappa_levels = 0 uses one level per cell.
RiemannResult burgers_riemann(std::size_t cells, double horizon = 0.5, std::size_t kappa_levels = 0);

/// Paths t -> <chi_n, d_xi(phi sigma_n)> of coarse solves driven by couple(W, B, a_n).
PathEnsemble claw_pairing_paths(const ClawFamily& family, const KineticConfig& config, std::size_t n);

}  // namespace stochlab
