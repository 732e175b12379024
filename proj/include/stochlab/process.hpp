#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stochlab/stats.hpp"
#include "stochlab/torus.hpp"
#include "stochlab/wiener.hpp"

namespace stochlab {

/// Randomness a process value may read.
enum Source : unsigned {
  source_none = 0,
  source_omega0 = 1U << 0U,
  source_wiener = 1U << 1U,
  source_auxiliary = 1U << 2U,
  source_amplitude = 1U << 3U,
};

struct ProcessShape {
  enum class Kind { scalar, matrix, field };
  Kind kind = Kind::scalar;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t cells = 1;

  static ProcessShape scalar() { return {}; }
  static ProcessShape matrix(std::size_t m, std::size_t k) { return {Kind::matrix, m, k, 1}; }
  static ProcessShape field(std::size_t cells, std::size_t m, std::size_t k) {
    return {Kind::field, m, k, cells};
  }
  /// Doubles stored per time node.
  std::size_t node_size() const noexcept { return rows * cols * cells; }
  friend bool operator==(const ProcessShape&, const ProcessShape&) = default;
};

/// Grid-sampled predictable process. Values live on the left nodes
/// t_0 .. t_{N-1}; `revealed(j)` is the last node whose randomness the value
/// at node j may read (-1 for F_0-measurable values). The process is
/// predictable iff revealed(j) <= j for every j.
class AdaptedProcess {
 public:
  AdaptedProcess(TimeGrid grid, ProcessShape shape, std::vector<double> values,
                 std::vector<long> revealed, unsigned sources);

  /// Values from `fill(j, out)`; revealed(j) = j if `sources` contains a
  /// Brownian source, else -1.
  static AdaptedProcess build(const TimeGrid& grid, ProcessShape shape, unsigned sources,
                              const std::function<void(std::size_t, std::span<double>)>& fill);
  static AdaptedProcess deterministic(const TimeGrid& grid, ProcessShape shape,
                                      const std::function<void(double, std::span<double>)>& fill);
  static AdaptedProcess zero(const TimeGrid& grid, ProcessShape shape);

  const TimeGrid& grid() const noexcept { return grid_; }
  const ProcessShape& shape() const noexcept { return shape_; }
  unsigned sources() const noexcept { return sources_; }
  std::size_t nodes() const noexcept { return grid_.steps(); }
  std::span<const double> node(std::size_t j) const {
    return {values_.data() + j * shape_.node_size(), shape_.node_size()};
  }
  std::span<const double> values() const noexcept { return values_; }
  long revealed(std::size_t j) const { return revealed_[j]; }

  bool predictable() const noexcept;
  /// Index of the first node violating predictability, or nodes() if none.
  std::size_t first_violation() const noexcept;

  /// Node-wise scalar function of the values (tags preserved).
  AdaptedProcess map(const std::function<double(double)>& f) const;

 private:
  TimeGrid grid_;
  ProcessShape shape_;
  std::vector<double> values_;
  std::vector<long> revealed_;
  unsigned sources_;
};

/// a * v1 + b * v2 with merged tags.
AdaptedProcess combine(double a, const AdaptedProcess& v1, double b, const AdaptedProcess& v2);

/// Torus quadrature <beta, V(t)> of a field-shaped process (rows x cols result).
AdaptedProcess pair(const TestFunction& beta, const AdaptedProcess& v);

/// Spatial L^1 quadrature of a field-shaped process at node j (Euclidean norm per cell).
double spatial_l1(const AdaptedProcess& v, std::size_t j);

/// Test random variables Y of the weak L^2(Omega) surrogate.
enum class TestVariable { one, w_terminal, w_terminal_sq, sin_omega, cos_omega, w_half };

std::vector<TestVariable> default_test_variables();
TestVariable parse_test_variable(const std::string& name);
std::string to_string(TestVariable y);
/// Y evaluated on the limit path W (first component) and omega_0.
double evaluate(TestVariable y, const WienerPath& w, double omega0);

struct ReplicaKey {
  std::uint64_t seed = 0;
  std::size_t replica = 0;
};

struct Ensemble {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

using ProcessGenerator = std::function<AdaptedProcess(const ReplicaKey&)>;

/// (E ||V||_{L^{p_t}(0,T)}^{p_omega})^{1/p_omega} by Monte Carlo.
double lp_norm(const ProcessGenerator& generate, double p_omega, double p_t, const Ensemble& ensemble);

struct ProcessPairSample {
  AdaptedProcess vn;
  AdaptedProcess v;
  std::vector<double> y;  // test variable values of this replica
};

using PairGenerator = std::function<ProcessPairSample(const ReplicaKey&)>;

/// Largest |E[Y int zeta : (V_n - V) dt]| over the dual and Y families.
struct GapEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t dual = 0;
  std::size_t y = 0;
  std::size_t samples = 0;
};

GapEstimate weak_gap(const PairGenerator& generate, const std::vector<AdaptedProcess>& duals,
                     const Ensemble& ensemble);

/// Exponent p > 2 with its conjugates p' = p/(p-1) and p'' = p/(p-2).
class ExponentSet {
 public:
  explicit ExponentSet(double p);
  double p() const noexcept { return p_; }
  double p_prime() const noexcept { return p_ / (p_ - 1.0); }
  double p_double_prime() const noexcept { return p_ / (p_ - 2.0); }

 private:
  double p_;
};

}  // namespace stochlab
