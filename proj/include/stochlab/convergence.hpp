#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "stochlab/mollify.hpp"
#include "stochlab/process.hpp"
#include "stochlab/stats.hpp"
#include "stochlab/torus.hpp"
#include "stochlab/wiener.hpp"

namespace stochlab {

enum class GapMode { weak, strong };
std::string to_string(GapMode mode);

/// One replica of the pair of stochastic integrals int V_n dW_n and int V dW.
struct IntegralSample {
  AdaptedProcess vn;
  AdaptedProcess v;
  WienerPath wn;
  WienerPath w;
  double omega0 = 0.0;
};

using IntegralGenerator = std::function<IntegralSample(const ReplicaKey&)>;

struct GapStatistic {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::string witness;  // Y (and component) attaining the weak-mode maximum
};

/// I(n) = int V_n dW_n - int V dW. Weak mode: max over Y and components of
/// |E[Y I(n)]|. Strong mode: E|I(n)|^2.
GapStatistic integral_gap(const IntegralGenerator& generate, GapMode mode, const std::vector<TestVariable>& ys,
                          const Ensemble& ensemble);

/// I(n) = I1 + I2 + I3 with I1 = int (V_n - R V_n) dW_n, I3 = int (R V - V) dW
/// and I2 = int R V_n dW_n - int R V dW. The second moments of I1 and I3 come
/// from the Ito isometry; I2 is simulated directly. The four integration by
/// parts pieces of I2 are reported as diagnostics.
struct DecompositionReport {
  double rho = 0.0;
  MeanEstimate i1_sq;
  MeanEstimate i3_sq;
  MeanEstimate i2_sq;
  MeanEstimate total_sq;
  GapStatistic i2_gap;
  GapStatistic total_gap;
  std::array<GapStatistic, 4> i2_parts;
  double i2_parts_residual = 0.0;  // E|I2 - (I21 + I22 + I23 + I24)|
  double i2_max_abs = 0.0;         // largest pathwise |I2|
  std::size_t samples = 0;
};

DecompositionReport decompose(const IntegralGenerator& generate, double rho, const std::vector<TestVariable>& ys,
                              const Ensemble& ensemble);

/// V = 1 + t, V_n = V + amplitude sin(2 pi n omega_0) exp(-t), W_n coupled with a_n.
IntegralGenerator weak_omega_family(const TimeGrid& grid, std::size_t n, CouplingSchedule coupling,
                                    double amplitude = 1.0);
/// V = 1 + t, V_n = V + sin(2 pi n t) Z with Z standard Gaussian and F_0-measurable.
IntegralGenerator temporal_family(const TimeGrid& grid, std::size_t n, CouplingSchedule coupling);
/// V = cos(W(t)), V_n = cos(W_n(t)): converges pathwise, so the integrals converge strongly.
IntegralGenerator pathwise_family(const TimeGrid& grid, std::size_t n, CouplingSchedule coupling);

struct FieldSample {
  AdaptedProcess vn;  // field shaped
  AdaptedProcess v;
  WienerPath wn;
  WienerPath w;
  double omega0 = 0.0;
};

using FieldGenerator = std::function<FieldSample(const ReplicaKey&)>;

/// V(t,x) = cos(W(t)) (1 + cos 2 pi x), V_n = V (1 + amplitude sin(2 pi n x)).
FieldGenerator spatial_family(const TimeGrid& grid, const TorusGrid& torus, std::size_t n, CouplingSchedule coupling,
                              double amplitude = 1.0);

struct L1ModeEntry {
  GapStatistic gap;
  double field_bound = 0.0;  // (E ||V_n||^p_{L^p_t L^1_x})^{1/p}
  MeanEstimate pairing_l2;   // E int |<beta, V_n - V>|^2 dt
};

/// Integral gap of the pairings <beta, V_n> with the field-level bound recorded.
L1ModeEntry l1_torus_mode(const FieldGenerator& generate, const TestFunction& beta, GapMode mode,
                          const std::vector<TestVariable>& ys, const Ensemble& ensemble, double p = 3.0);

/// Oscillating counterexample: F_n = sin(2 pi n omega) sin(2 pi n t) on [0, 1].
struct SineResult {
  std::size_t n = 0;
  MeanEstimate second_moment;  // E |int F_n dW_n|^2
  MeanEstimate pairing_one;    // E int F_n dt
  MeanEstimate pairing_sin;    // E int F_n sin(2 pi t) dt
};

/// All n share the replica's W and B (W_n = couple(W, B, a_n)).
std::vector<SineResult> counterexample_sine(const std::vector<std::size_t>& ns, const Ensemble& ensemble,
                                            std::size_t steps, CouplingSchedule coupling = {});

/// Spike counterexample: f_n = sqrt(n) 1_[0, 1/n] on [0, 1].
struct SpikeResult {
  std::size_t n = 0;
  MeanEstimate mean;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double tail = 0.0;     // P(|I| > 1.96), 0.05 for a standard normal
  double norm_sq = 0.0;  // ||f_n||^2_{L^2}
  double pairing_t = 0.0;
};

/// Rejects N_t < 8n and spikes whose edge 1/n falls off the grid.
std::vector<SpikeResult> counterexample_spike(const std::vector<std::size_t>& ns, const Ensemble& ensemble,
                                              std::size_t steps, CouplingSchedule coupling = {});

/// Spike integrand as a process (exposed for tests).
AdaptedProcess spike_integrand(const TimeGrid& grid, std::size_t n);

/// int_0^T f g dt for a scalar process f (constant on each step) and a grid
/// function g (trapezoid on each step).
double time_pairing(const AdaptedProcess& f, const GridFunction& g);

/// Verdict helper for the "gap decreases along n" criterion: log-log slope
/// <= slope_limit, or last <= ratio * first.
struct Trend {
  double slope = 0.0;
  double ratio = 0.0;
  bool decreasing = false;
};

Trend assess_trend(const std::vector<std::size_t>& ns, const std::vector<double>& values, double slope_limit = -0.3,
                   double ratio_limit = 1.0 / 3.0);

struct ConvergenceReport {
  std::string experiment;
  GapMode mode = GapMode::weak;
  std::vector<std::size_t> ns;
  std::vector<GapStatistic> stats;
  Trend trend;
  std::string verdict;  // pass, fail or invalid
};

}  // namespace stochlab
