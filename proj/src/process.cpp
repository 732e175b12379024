#include "stochlab/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/parallel.hpp"

namespace stochlab {

namespace {

constexpr unsigned brownian_sources = source_wiener | source_auxiliary;

}  // namespace

AdaptedProcess::AdaptedProcess(TimeGrid grid, ProcessShape shape, std::vector<double> values,
                               std::vector<long> revealed, unsigned sources)
    : grid_(grid),
      shape_(shape),
      values_(std::move(values)),
      revealed_(std::move(revealed)),
      sources_(sources) {
  if (shape_.node_size() == 0) throw ConfigError("process shape has no components");
  if (values_.size() != grid_.steps() * shape_.node_size())
    throw GridMismatch("process value count does not match grid and shape");
  if (revealed_.size() != grid_.steps()) throw GridMismatch("process tag count does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw ConfigError("process values must be finite");
}

AdaptedProcess AdaptedProcess::build(const TimeGrid& grid, ProcessShape shape, unsigned sources,
                                     const std::function<void(std::size_t, std::span<double>)>& fill) {
  const std::size_t width = shape.node_size();
  std::vector<double> values(grid.steps() * width);
  std::vector<long> revealed(grid.steps(), -1);
  const bool brownian = (sources & brownian_sources) != 0U;
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    fill(j, {values.data() + j * width, width});
    if (brownian) revealed[j] = static_cast<long>(j);
  }
  return {grid, shape, std::move(values), std::move(revealed), sources};
}

AdaptedProcess AdaptedProcess::deterministic(const TimeGrid& grid, ProcessShape shape,
                                             const std::function<void(double, std::span<double>)>& fill) {
  return build(grid, shape, source_none,
               [&](std::size_t j, std::span<double> out) { fill(grid.time(j), out); });
}

AdaptedProcess AdaptedProcess::zero(const TimeGrid& grid, ProcessShape shape) {
  return {grid, shape, std::vector<double>(grid.steps() * shape.node_size(), 0.0),
          std::vector<long>(grid.steps(), -1), source_none};
}

bool AdaptedProcess::predictable() const noexcept { return first_violation() == nodes(); }

std::size_t AdaptedProcess::first_violation() const noexcept {
  for (std::size_t j = 0; j < revealed_.size(); ++j)
    if (revealed_[j] > static_cast<long>(j)) return j;
  return revealed_.size();
}

AdaptedProcess AdaptedProcess::map(const std::function<double(double)>& f) const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), f);
  return {grid_, shape_, std::move(v), revealed_, sources_};
}

AdaptedProcess combine(double a, const AdaptedProcess& v1, double b, const AdaptedProcess& v2) {
  if (!(v1.grid() == v2.grid())) throw GridMismatch("processes live on different time grids");
  if (!(v1.shape() == v2.shape())) throw GridMismatch("processes have different shapes");
  const auto x = v1.values();
  const auto y = v2.values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
  std::vector<long> revealed(v1.nodes());
  for (std::size_t j = 0; j < revealed.size(); ++j) revealed[j] = std::max(v1.revealed(j), v2.revealed(j));
  return {v1.grid(), v1.shape(), std::move(out), std::move(revealed), v1.sources() | v2.sources()};
}

AdaptedProcess pair(const TestFunction& beta, const AdaptedProcess& v) {
  const auto& shape = v.shape();
  if (shape.kind != ProcessShape::Kind::field) throw GridMismatch("pairing needs a field-shaped process");
  if (shape.cells != beta.grid().cells()) throw GridMismatch("test function and field use different grids");
  const std::size_t block = shape.rows * shape.cols;
  const double w = beta.grid().cell_volume();
  const auto& b = beta.values();
  std::vector<double> out(v.nodes() * block, 0.0);
  std::vector<long> revealed(v.nodes());
  for (std::size_t j = 0; j < v.nodes(); ++j) {
    const auto node = v.node(j);
    for (std::size_t c = 0; c < block; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < shape.cells; ++i) s += b[i] * node[i * block + c];
      out[j * block + c] = s * w;
    }
    revealed[j] = v.revealed(j);
  }
  return {v.grid(), ProcessShape::matrix(shape.rows, shape.cols), std::move(out), std::move(revealed),
          v.sources()};
}

double spatial_l1(const AdaptedProcess& v, std::size_t j) {
  const auto& shape = v.shape();
  if (shape.kind != ProcessShape::Kind::field) throw GridMismatch("spatial L1 needs a field-shaped process");
  const std::size_t block = shape.rows * shape.cols;
  const auto node = v.node(j);
  double s = 0.0;
  for (std::size_t i = 0; i < shape.cells; ++i) {
    double e = 0.0;
    for (std::size_t c = 0; c < block; ++c) e += node[i * block + c] * node[i * block + c];
    s += std::sqrt(e);
  }
  return s / static_cast<double>(shape.cells);
}

std::vector<TestVariable> default_test_variables() {
  return {TestVariable::one,       TestVariable::w_terminal, TestVariable::w_terminal_sq,
          TestVariable::sin_omega, TestVariable::cos_omega,  TestVariable::w_half};
}

TestVariable parse_test_variable(const std::string& name) {
  for (auto y : default_test_variables())
    if (to_string(y) == name) return y;
  throw ConfigError("unknown test variable '" + name +
                    "' (accepted: one, w_T, w_T_sq, sin_omega, cos_omega, w_half)");
}

std::string to_string(TestVariable y) {
  switch (y) {
    case TestVariable::one: return "one";
    case TestVariable::w_terminal: return "w_T";
    case TestVariable::w_terminal_sq: return "w_T_sq";
    case TestVariable::sin_omega: return "sin_omega";
    case TestVariable::cos_omega: return "cos_omega";
    case TestVariable::w_half: return "w_half";
  }
  return "?";
}

double evaluate(TestVariable y, const WienerPath& w, double omega0) {
  const auto& g = w.grid();
  switch (y) {
    case TestVariable::one: return 1.0;
    case TestVariable::w_terminal: return w.at(g.steps(), 0);
    case TestVariable::w_terminal_sq: {
      const double wt = w.at(g.steps(), 0);
      return wt * wt - g.horizon();
    }
    case TestVariable::sin_omega: return std::sin(2.0 * std::numbers::pi * omega0);
    case TestVariable::cos_omega: return std::cos(2.0 * std::numbers::pi * omega0);
    case TestVariable::w_half: return w.at(g.steps() / 2, 0);
  }
  return 0.0;
}

double lp_norm(const ProcessGenerator& generate, double p_omega, double p_t, const Ensemble& ensemble) {
  if (ensemble.samples == 0) throw ConfigError("lp_norm needs a non-empty ensemble");
  if (p_omega < 1.0 || p_t < 1.0) throw ConfigError("lp_norm exponents must be >= 1");
  const auto table = parallel::map_replicas(ensemble.samples, 1, [&](std::size_t r, std::span<double> out) {
    const auto v = generate({ensemble.seed, r});
    const double dt = v.grid().dt();
    double integral = 0.0;
    for (std::size_t j = 0; j < v.nodes(); ++j) {
      double e = 0.0;
      for (double x : v.node(j)) e += x * x;
      integral += std::pow(std::sqrt(e), p_t) * dt;
    }
    out[0] = std::pow(integral, p_omega / p_t);
  });
  const double m = pairwise_sum(table.column(0)) / static_cast<double>(ensemble.samples);
  return std::pow(m, 1.0 / p_omega);
}

GapEstimate weak_gap(const PairGenerator& generate, const std::vector<AdaptedProcess>& duals,
                     const Ensemble& ensemble) {
  GapEstimate best;
  best.samples = ensemble.samples;
  if (duals.empty() || ensemble.samples == 0) return best;
  // The Y family size is fixed by the first replica.
  const std::size_t ys = generate({ensemble.seed, 0}).y.size();
  if (ys == 0) return best;
  const auto table = parallel::map_replicas(ensemble.samples, duals.size() * ys, [&](std::size_t r, std::span<double> out) {
    const auto s = generate({ensemble.seed, r});
    if (!(s.vn.grid() == s.v.grid()) || !(s.vn.shape() == s.v.shape()))
      throw GridMismatch("weak_gap: V_n and V are not comparable");
    if (s.y.size() != ys) throw ConfigError("weak_gap: Y family size changed between replicas");
    const double dt = s.v.grid().dt();
    for (std::size_t d = 0; d < duals.size(); ++d) {
      const auto& z = duals[d];
      if (!(z.grid() == s.v.grid()) || z.shape().node_size() != s.v.shape().node_size())
        throw GridMismatch("weak_gap: dual function shape mismatch");
      double pairing = 0.0;
      for (std::size_t j = 0; j < s.v.nodes(); ++j) {
        const auto a = s.vn.node(j);
        const auto b = s.v.node(j);
        const auto zeta = z.node(j);
        for (std::size_t c = 0; c < a.size(); ++c) pairing += zeta[c] * (a[c] - b[c]);
      }
      pairing *= dt;
      for (std::size_t k = 0; k < ys; ++k) out[d * ys + k] = s.y[k] * pairing;
    }
  });
  bool first = true;
  for (std::size_t d = 0; d < duals.size(); ++d)
    for (std::size_t k = 0; k < ys; ++k) {
      const auto e = table.mean(d * ys + k);
      if (first || std::abs(e.mean) > best.value) {
        best.value = std::abs(e.mean);
        best.stderr_ = e.stderr_;
        best.dual = d;
        best.y = k;
        first = false;
      }
    }
  return best;
}

ExponentSet::ExponentSet(double p) : p_(p) {
  if (!(p > 2.0) || !std::isfinite(p)) throw ConfigError("exponent p must be finite and > 2");
}

}  // namespace stochlab
