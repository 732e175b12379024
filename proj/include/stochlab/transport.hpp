#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stochlab/convergence.hpp"
#include "stochlab/process.hpp"
#include "stochlab/stats.hpp"
#include "stochlab/torus.hpp"
#include "stochlab/translation.hpp"
#include "stochlab/wiener.hpp"

namespace stochlab {

using Point = std::array<double, 2>;
using ScalarField = std::function<double(double t, Point x)>;
using VectorField = std::function<Point(double t, Point x)>;

/// Noise coefficient: state dependent sigma(u) in R^k or additive sigma(t, x) in R^k.
struct Noise {
  enum class Kind { none, multiplicative, additive };
  Kind kind = Kind::none;
  std::size_t dim = 1;
  std::function<void(double u, std::span<double> out)> coefficient;
  std::function<void(double t, Point x, std::span<double> out)> field;
  double lipschitz = 0.0;
  double bound = 0.0;  // sup |sigma|

  static Noise none(std::size_t dim = 1);
  static Noise multiplicative(std::size_t dim, std::function<void(double, std::span<double>)> f, double lipschitz,
                              double bound);
  static Noise additive(std::size_t dim, std::function<void(double, Point, std::span<double>)> f, double bound);
};

/// du + div(b u) dt = f dt + eps Lap u dt + sigma dW on the torus.
struct TransportProblem {
  TorusGrid grid{16};
  VectorField velocity;
  ScalarField divergence;
  ScalarField source;  // empty means f = 0
  Noise noise;
  double viscosity = 0.0;
  std::function<double(Point x, double omega0)> initial;
  ExponentSet exponents{3.0};
  bool steady = true;  // b, f and an additive sigma do not depend on t

  /// Throws ConfigError if div b disagrees with spectral differentiation of b.
  void validate() const;
};

/// Snapshots u(t_j, x_i) of one solve with the energy trace int u^2/2 dx.
class FieldPath {
 public:
  FieldPath(TorusGrid grid, TimeGrid times, std::vector<double> values);

  const TorusGrid& grid() const noexcept { return grid_; }
  const TimeGrid& times() const noexcept { return times_; }
  std::size_t snapshots() const noexcept { return times_.steps() + 1; }
  std::span<const double> at(std::size_t j) const { return {values_.data() + j * grid_.cells(), grid_.cells()}; }
  const std::vector<double>& energy() const noexcept { return energy_; }
  double mass(std::size_t j) const;
  /// Largest difference between the stored energy trace and a recomputation.
  double energy_drift() const;
  /// Cell averages over blocks of factor^d fine cells.
  FieldPath coarsened(std::size_t factor) const;

 private:
  TorusGrid grid_;
  TimeGrid times_;
  std::vector<double> values_;
  std::vector<double> energy_;
};

struct SolveOptions {
  std::size_t store_stride = 1;
  double cfl_limit = 0.9;
};

/// Upwind fluxes for div(b u), centred eps Lap u, forward Euler source and
/// Euler-Maruyama noise, on the time grid of w. omega_0 of (seed, replica)
/// feeds random initial data.
FieldPath solve_transport(const TransportProblem& problem, const WienerPath& w, std::uint64_t seed,
                          std::size_t replica, SolveOptions options = {});

/// CFL number max|b| dt/dx + 2 d eps dt/dx^2 of the problem on a time grid.
double cfl_number(const TransportProblem& problem, const TimeGrid& grid);

/// Discrete weak form at snapshot `node` (store_stride 1 solves only).
double weak_residual(const FieldPath& u, const TransportProblem& problem, const WienerPath& w,
                     const TestFunction& phi, std::size_t node);

std::vector<double> energy_trace(const FieldPath& u);
/// int psi theta(u(t_j, x)) dx per snapshot.
std::vector<double> renormalized_pairing(const FieldPath& u, const TestFunction& psi,
                                         const std::function<double(double)>& theta);

/// Empirical variance inequality at one space-time point.
struct VarianceCheck {
  double variance = 0.0;        // E|sigma(u) - E sigma(u)|^2
  double about_mean = 0.0;      // E|sigma(u) - sigma(E u)|^2
  double lipschitz_bound = 0.0; // L^2 Var(u)
  double stderr_ = 0.0;
};

VarianceCheck variance_inequality(std::span<const double> u, const std::function<double(double)>& sigma,
                                  double lipschitz);

/// Built-in coefficient families indexed by n (n = 0 is the limit problem):
///   b   = drift + swing sin(2 pi x) + (velocity_perturbation / n^2) sin(2 pi n x)
///   f   = forcing sin(2 pi x) + (source_perturbation / n) sin(2 pi n x)
///   u0  = 1 + 0.5 sin(2 pi x) + (initial_perturbation / n) cos(2 pi n x) + initial_randomness (omega_0 - 1/2)
///   sigma(u) = s (sin u, cos u), or additive s (1 + 0.5 sin 2 pi x) + (noise_perturbation / n) sin(2 pi n x)
///   eps = viscosity_scale / n
/// Coordinates enter through x_0 only; in 2D the data are constant along x_1.
struct TransportFamily {
  enum class NoiseKind { none, multiplicative, additive };
  std::size_t dim = 1;
  double drift = 1.0;
  double swing = 0.5;
  double velocity_perturbation = 0.5;
  double forcing = 0.0;
  double source_perturbation = 0.0;
  double initial_perturbation = 0.5;
  double initial_randomness = 0.0;
  NoiseKind noise = NoiseKind::multiplicative;
  double noise_amplitude = 0.5;
  double noise_perturbation = 0.0;
  double viscosity_scale = 1.0;
  double p = 3.0;

  TransportProblem problem(const TorusGrid& grid, std::size_t n) const;
  /// The test function psi = 1 + 0.5 cos(2 pi x_0).
  TestFunction psi(const TorusGrid& grid) const;
};

TransportFamily::NoiseKind parse_noise_kind(const std::string& name);

struct StabilityConfig {
  double horizon = 0.1;
  std::size_t cells = 128;
  std::size_t steps = 2048;
  std::vector<std::size_t> ns{2, 8, 32};
  std::size_t refine = 4;
  CouplingSchedule coupling;
  Ensemble ensemble{1, 200};
  std::vector<TestVariable> ys = default_test_variables();
  double bounded_factor = 2.0;
};

struct StabilityEntry {
  std::size_t n = 0;
  double lp_distance = 0.0;  // ||u_n - u_ref||_{L^p(Omega x [0,T] x T^d)}
  double lp_stderr = 0.0;
  MeanEstimate energy_sup;   // E sup_t ||u_n(t)||^2
  double gronwall = 0.0;
  GapStatistic sigma_gap;    // int <psi, sigma(u_n)> dW_n vs the limit
  GapStatistic eta_gap;      // int <psi, u_n sigma(u_n)> dW_n vs the limit
  GapStatistic sign_pairing;      // largest E[Y F_n] for F_n <= 0, Y >= 0
  bool sign_preserved = true;
  double velocity_distance = 0.0;
  double divergence_distance = 0.0;
  double source_distance = 0.0;
  double initial_distance = 0.0;
  double divergence_sup = 0.0;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;
  std::vector<std::string> monitor_failures;
  double mass_drift = 0.0;  // f = sigma = 0 conservation check
  Trend trend;

  bool monitors_ok() const noexcept { return monitor_failures.empty(); }
};

/// Solves the n-ladder against the fine-mesh limit reference (refine x mesh
/// and time steps, same W) and records distances, energy and integral gaps.
StabilityReport stability_experiment(const TransportFamily& family, const StabilityConfig& config);

/// Sup-in-time Gronwall bound for E sup_t ||u(t)||^2 from the problem data.
double gronwall_bound(const TransportProblem& problem, double horizon);

/// Paths t -> <psi, u_n sin(u_n)> of coarse solves driven by couple(W, B, a_n).
PathEnsemble transport_pairing_paths(const TransportFamily& family, const StabilityConfig& config, std::size_t n);

}  // namespace stochlab
