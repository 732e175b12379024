#include "stochlab/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/ito.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/rng.hpp"

namespace stochlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Columns of a weak-mode block: [y][component] holding Y * I_c.
std::size_t weak_width(std::size_t components, const std::vector<TestVariable>& ys) {
  return components * ys.size();
}

void fill_weak(std::span<double> out, std::span<const double> diff, const std::vector<TestVariable>& ys,
               const WienerPath& w, double omega0) {
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double y = evaluate(ys[k], w, omega0);
    for (std::size_t c = 0; c < diff.size(); ++c) out[k * diff.size() + c] = y * diff[c];
  }
}

GapStatistic summarize_weak(const SampleTable& table, std::size_t offset, std::size_t components,
                            const std::vector<TestVariable>& ys) {
  GapStatistic best;
  best.samples = table.rows();
  for (std::size_t k = 0; k < ys.size(); ++k)
    for (std::size_t c = 0; c < components; ++c) {
      const auto e = table.mean(offset + k * components + c);
      if (best.witness.empty() || std::abs(e.mean) > best.value) {
        best.value = std::abs(e.mean);
        best.stderr_ = e.stderr_;
        best.witness = to_string(ys[k]) + (components > 1 ? "[" + std::to_string(c) + "]" : "");
      }
    }
  return best;
}

GapStatistic summarize_strong(const SampleTable& table, std::size_t column) {
  const auto e = table.mean(column);
  return {e.mean, e.stderr_, table.rows(), "|I|^2"};
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void check_pair(const AdaptedProcess& vn, const AdaptedProcess& v) {
  if (!(vn.shape() == v.shape()) || !(vn.grid() == v.grid()))
    throw GridMismatch("V_n and V must share grid and shape");
}

std::size_t components_of(const IntegralGenerator& generate, const Ensemble& ensemble) {
  if (ensemble.samples == 0) throw ConfigError("integral gap needs a non-empty ensemble");
  return generate({ensemble.seed, 0}).v.shape().rows;
}

WienerPath coupled(const WienerPath& w, std::uint64_t seed, std::size_t replica, double a) {
  if (a == 0.0) return w;
  return couple(w, sample_wiener(w.grid(), w.dim(), seed, replica, Channel::auxiliary), a);
}

}  // namespace

std::string to_string(GapMode mode) { return mode == GapMode::weak ? "weak" : "strong"; }

GapStatistic integral_gap(const IntegralGenerator& generate, GapMode mode, const std::vector<TestVariable>& ys,
                          const Ensemble& ensemble) {
  const std::size_t m = components_of(generate, ensemble);
  if (mode == GapMode::weak && ys.empty()) return {0.0, 0.0, ensemble.samples, ""};
  const std::size_t width = mode == GapMode::weak ? weak_width(m, ys) : 1;
  const auto table = parallel::map_replicas(ensemble.samples, width, [&](std::size_t r, std::span<double> out) {
    const auto s = generate({ensemble.seed, r});
    check_pair(s.vn, s.v);
    const auto d = difference(ito_integral(s.vn, s.wn), ito_integral(s.v, s.w));
    if (mode == GapMode::weak)
      fill_weak(out, d, ys, s.w, s.omega0);
    else
      out[0] = squared_norm(d);
  });
  return mode == GapMode::weak ? summarize_weak(table, 0, m, ys) : summarize_strong(table, 0);
}

namespace {

// Component (r, c) of a matrix process on nodes 0..N; the value at N is a
// copy of N - 1 and never read by the causal operators.
GridFunction component(const AdaptedProcess& v, std::size_t index) {
  std::vector<double> x(v.nodes() + 1);
  for (std::size_t j = 0; j < v.nodes(); ++j) x[j] = v.node(j)[index];
  x[v.nodes()] = x[v.nodes() - 1];
  return {v.grid(), std::move(x)};
}

double trapezoid_product(const std::vector<double>& f, const WienerPath& w, std::size_t c, double scale_w,
                         const WienerPath* w2) {
  const std::size_t n = f.size() - 1;
  double s = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double wj = w.at(j, c) - (w2 ? w2->at(j, c) : 0.0);
    s += (j == 0 || j == n ? 0.5 : 1.0) * f[j] * wj * scale_w;
  }
  return s * w.grid().dt();
}

}  // namespace

DecompositionReport decompose(const IntegralGenerator& generate, double rho, const std::vector<TestVariable>& ys,
                              const Ensemble& ensemble) {
  const std::size_t m = components_of(generate, ensemble);
  const MollifierKernel kernel(rho);
  // Fixed columns: q1, q3, |I2|^2, |I|^2, |I2 - sum parts|, |I2|; then the
  // weak blocks for I2, I and the four parts.
  constexpr std::size_t fixed = 6;
  const std::size_t block = weak_width(m, ys);
  const std::size_t width = fixed + 6 * block;
  const auto table = parallel::map_replicas(ensemble.samples, width, [&](std::size_t r, std::span<double> out) {
    const auto s = generate({ensemble.seed, r});
    check_pair(s.vn, s.v);
    const auto rvn = mollify(kernel, s.vn);
    const auto rv = mollify(kernel, s.v);
    out[0] = quadratic_integral(combine(1.0, s.vn, -1.0, rvn));
    out[1] = quadratic_integral(combine(1.0, rv, -1.0, s.v));
    const auto i2 = difference(ito_integral(rvn, s.wn), ito_integral(rv, s.w));
    const auto total = difference(ito_integral(s.vn, s.wn), ito_integral(s.v, s.w));
    out[2] = squared_norm(i2);
    out[3] = squared_norm(total);

    const std::size_t k = s.v.shape().cols;
    const std::size_t n = s.v.nodes();
    std::array<std::vector<double>, 4> parts;
    for (auto& p : parts) p.assign(m, 0.0);
    for (std::size_t row = 0; row < m; ++row)
      for (std::size_t c = 0; c < k; ++c) {
        const auto fn = component(s.vn, row * k + c);
        const auto f = component(s.v, row * k + c);
        const auto dfn = mollify_derivative(kernel, fn).values;
        const auto df = mollify_derivative(kernel, f).values;
        const double rfn_t = mollify(kernel, fn).values[n];
        const double rf_t = mollify(kernel, f).values[n];
        parts[0][row] -= trapezoid_product(difference(dfn, df), s.wn, c, 1.0, nullptr);
        parts[1][row] += (rfn_t - rf_t) * s.wn.at(n, c);
        parts[2][row] += trapezoid_product(df, s.w, c, 1.0, &s.wn);
        parts[3][row] += rf_t * (s.wn.at(n, c) - s.w.at(n, c));
      }
    double residual = 0.0;
    for (std::size_t row = 0; row < m; ++row)
      residual += std::abs(i2[row] - (parts[0][row] + parts[1][row] + parts[2][row] + parts[3][row]));
    out[4] = residual;
    out[5] = std::sqrt(out[2]);
    fill_weak(out.subspan(fixed, block), i2, ys, s.w, s.omega0);
    fill_weak(out.subspan(fixed + block, block), total, ys, s.w, s.omega0);
    for (std::size_t p = 0; p < 4; ++p) fill_weak(out.subspan(fixed + (2 + p) * block, block), parts[p], ys, s.w, s.omega0);
  });

  DecompositionReport rep;
  rep.rho = rho;
  rep.samples = ensemble.samples;
  rep.i1_sq = table.mean(0);
  rep.i3_sq = table.mean(1);
  rep.i2_sq = table.mean(2);
  rep.total_sq = table.mean(3);
  rep.i2_parts_residual = table.mean(4).mean;
  const auto abs_i2 = table.column(5);
  rep.i2_max_abs = abs_i2.empty() ? 0.0 : *std::max_element(abs_i2.begin(), abs_i2.end());
  if (!ys.empty()) {
    rep.i2_gap = summarize_weak(table, fixed, m, ys);
    rep.total_gap = summarize_weak(table, fixed + block, m, ys);
    for (std::size_t p = 0; p < 4; ++p) rep.i2_parts[p] = summarize_weak(table, fixed + (2 + p) * block, m, ys);
  }
  return rep;
}

IntegralGenerator weak_omega_family(const TimeGrid& grid, std::size_t n, CouplingSchedule coupling,
                                    double amplitude) {
  const double a = coupling.coefficient(n);
  return [=](const ReplicaKey& key) {
    const auto w = sample_wiener(grid, 1, key.seed, key.replica);
    const double om = omega0(key.seed, key.replica);
    const double osc = amplitude * std::sin(two_pi * static_cast<double>(n) * om);
    auto v = AdaptedProcess::deterministic(grid, ProcessShape::scalar(),
                                           [](double t, std::span<double> out) { out[0] = 1.0 + t; });
    auto vn = AdaptedProcess::build(grid, ProcessShape::scalar(), source_omega0, [&](std::size_t j, std::span<double> out) {
      const double t = grid.time(j);
      out[0] = 1.0 + t + osc * std::exp(-t);
    });
    return IntegralSample{std::move(vn), std::move(v), coupled(w, key.seed, key.replica, a), w, om};
  };
}

IntegralGenerator temporal_family(const TimeGrid& grid, std::size_t n, CouplingSchedule coupling) {
  const double a = coupling.coefficient(n);
  return [=](const ReplicaKey& key) {
    const auto w = sample_wiener(grid, 1, key.seed, key.replica);
    const double z = amplitude(key.seed, key.replica);
    auto v = AdaptedProcess::deterministic(grid, ProcessShape::scalar(),
                                           [](double t, std::span<double> out) { out[0] = 1.0 + t; });
    auto vn = AdaptedProcess::build(grid, ProcessShape::scalar(), source_amplitude, [&](std::size_t j, std::span<double> out) {
      const double t = grid.time(j);
      out[0] = 1.0 + t + std::sin(two_pi * static_cast<double>(n) * t) * z;
    });
    return IntegralSample{std::move(vn), std::move(v), coupled(w, key.seed, key.replica, a), w,
                          omega0(key.seed, key.replica)};
  };
}

IntegralGenerator pathwise_family(const TimeGrid& grid, std::size_t n, CouplingSchedule coupling) {
  const double a = coupling.coefficient(n);
  return [=](const ReplicaKey& key) {
    const auto w = sample_wiener(grid, 1, key.seed, key.replica);
    auto wn = coupled(w, key.seed, key.replica, a);
    auto v = AdaptedProcess::build(grid, ProcessShape::scalar(), source_wiener,
                                   [&](std::size_t j, std::span<double> out) { out[0] = std::cos(w.at(j, 0)); });
    auto vn = AdaptedProcess::build(grid, ProcessShape::scalar(), source_wiener | source_auxiliary,
                                    [&](std::size_t j, std::span<double> out) { out[0] = std::cos(wn.at(j, 0)); });
    return IntegralSample{std::move(vn), std::move(v), std::move(wn), w, omega0(key.seed, key.replica)};
  };
}

FieldGenerator spatial_family(const TimeGrid& grid, const TorusGrid& torus, std::size_t n, CouplingSchedule coupling,
                              double amplitude) {
  const double a = coupling.coefficient(n);
  return [=](const ReplicaKey& key) {
    const auto w = sample_wiener(grid, 1, key.seed, key.replica);
    const auto shape = ProcessShape::field(torus.cells(), 1, 1);
    std::vector<double> base(torus.cells()), osc(torus.cells());
    for (std::size_t i = 0; i < torus.cells(); ++i) {
      const double x = torus.center(i);
      base[i] = 1.0 + std::cos(two_pi * x);
      osc[i] = 1.0 + amplitude * std::sin(two_pi * static_cast<double>(n) * x);
    }
    auto v = AdaptedProcess::build(grid, shape, source_wiener, [&](std::size_t j, std::span<double> out) {
      const double h = std::cos(w.at(j, 0));
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = h * base[i];
    });
    auto vn = AdaptedProcess::build(grid, shape, source_wiener, [&](std::size_t j, std::span<double> out) {
      const double h = std::cos(w.at(j, 0));
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = h * base[i] * osc[i];
    });
    return FieldSample{std::move(vn), std::move(v), coupled(w, key.seed, key.replica, a), w,
                       omega0(key.seed, key.replica)};
  };
}

L1ModeEntry l1_torus_mode(const FieldGenerator& generate, const TestFunction& beta, GapMode mode,
                          const std::vector<TestVariable>& ys, const Ensemble& ensemble, double p) {
  if (ensemble.samples == 0) throw ConfigError("l1 torus mode needs a non-empty ensemble");
  if (p < 1.0) throw ConfigError("l1 torus mode exponent must be >= 1");
  const std::size_t m = generate({ensemble.seed, 0}).v.shape().rows;
  constexpr std::size_t fixed = 2;
  const std::size_t width = fixed + (mode == GapMode::weak ? weak_width(m, ys) : 1);
  const auto table = parallel::map_replicas(ensemble.samples, width, [&](std::size_t r, std::span<double> out) {
    const auto s = generate({ensemble.seed, r});
    check_pair(s.vn, s.v);
    const auto pn = pair(beta, s.vn);
    const auto pv = pair(beta, s.v);
    const double dt = s.v.grid().dt();
    double bound = 0.0;
    for (std::size_t j = 0; j < s.vn.nodes(); ++j) bound += std::pow(spatial_l1(s.vn, j), p) * dt;
    out[0] = bound;
    out[1] = quadratic_integral(combine(1.0, pn, -1.0, pv));
    const auto d = difference(ito_integral(pn, s.wn), ito_integral(pv, s.w));
    if (mode == GapMode::weak)
      fill_weak(out.subspan(fixed), d, ys, s.w, s.omega0);
    else
      out[fixed] = squared_norm(d);
  });
  L1ModeEntry e;
  e.field_bound = std::pow(table.mean(0).mean, 1.0 / p);
  e.pairing_l2 = table.mean(1);
  if (mode == GapMode::weak)
    e.gap = ys.empty() ? GapStatistic{0.0, 0.0, ensemble.samples, ""} : summarize_weak(table, fixed, m, ys);
  else
    e.gap = summarize_strong(table, fixed);
  return e;
}

double time_pairing(const AdaptedProcess& f, const GridFunction& g) {
  if (!(f.grid() == g.grid)) throw GridMismatch("time pairing on different grids");
  if (f.shape().node_size() != 1) throw GridMismatch("time pairing needs a scalar process");
  double s = 0.0;
  for (std::size_t j = 0; j < f.nodes(); ++j) s += f.node(j)[0] * 0.5 * (g.values[j] + g.values[j + 1]);
  return s * f.grid().dt();
}

std::vector<SineResult> counterexample_sine(const std::vector<std::size_t>& ns, const Ensemble& ensemble,
                                            std::size_t steps, CouplingSchedule coupling) {
  if (ensemble.samples == 0) throw ConfigError("counterexample needs a non-empty ensemble");
  const TimeGrid grid(1.0, steps);
  const double dt = grid.dt();
  // Deterministic factors: int sin(2 pi n t) g dt with g = 1 and g = sin(2 pi t).
  std::vector<std::vector<double>> temporal(ns.size());
  std::vector<double> weight_one(ns.size()), weight_sin(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw ConfigError("counterexample index n must be >= 1");
    const double freq = two_pi * static_cast<double>(ns[i]);
    temporal[i].resize(steps);
    for (std::size_t j = 0; j < steps; ++j) {
      const double s = std::sin(freq * grid.time(j));
      temporal[i][j] = s;
      weight_one[i] += s * dt;
      weight_sin[i] += s * 0.5 * (std::sin(two_pi * grid.time(j)) + std::sin(two_pi * grid.time(j + 1))) * dt;
    }
  }
  const auto table = parallel::map_replicas(ensemble.samples, 3 * ns.size(), [&](std::size_t r, std::span<double> out) {
    const auto w = sample_wiener(grid, 1, ensemble.seed, r);
    const auto b = sample_wiener(grid, 1, ensemble.seed, r, Channel::auxiliary);
    const double om = omega0(ensemble.seed, r);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const auto wn = coupling.identity() ? w : couple(w, b, coupling.coefficient(ns[i]));
      const double amp = std::sin(two_pi * static_cast<double>(ns[i]) * om);
      double integral = 0.0;
      for (std::size_t j = 0; j < steps; ++j) integral += temporal[i][j] * wn.increment(j, 0);
      integral *= amp;
      out[3 * i] = integral * integral;
      out[3 * i + 1] = amp * weight_one[i];
      out[3 * i + 2] = amp * weight_sin[i];
    }
  });
  std::vector<SineResult> res;
  for (std::size_t i = 0; i < ns.size(); ++i)
    res.push_back({ns[i], table.mean(3 * i), table.mean(3 * i + 1), table.mean(3 * i + 2)});
  return res;
}

AdaptedProcess spike_integrand(const TimeGrid& grid, std::size_t n) {
  if (n == 0) throw ConfigError("spike index n must be >= 1");
  if (grid.steps() < 8 * n) throw ConfigError("spike 1/n unresolved: need N_t >= 8n");
  const double width = grid.horizon() / static_cast<double>(n);
  const double ratio = width / grid.dt();
  if (std::abs(ratio - std::round(ratio)) > 1e-9) throw ConfigError("spike edge 1/n is not a grid node");
  const auto last = static_cast<std::size_t>(std::round(ratio));
  const double height = std::sqrt(static_cast<double>(n));
  return AdaptedProcess::build(grid, ProcessShape::scalar(), source_none,
                               [&](std::size_t j, std::span<double> out) { out[0] = j < last ? height : 0.0; });
}

std::vector<SpikeResult> counterexample_spike(const std::vector<std::size_t>& ns, const Ensemble& ensemble,
                                              std::size_t steps, CouplingSchedule coupling) {
  if (ensemble.samples < 2) throw ConfigError("spike counterexample needs at least 2 samples");
  const TimeGrid grid(1.0, steps);
  std::vector<AdaptedProcess> spikes;
  for (std::size_t n : ns) spikes.push_back(spike_integrand(grid, n));
  const auto table = parallel::map_replicas(ensemble.samples, 2 * ns.size(), [&](std::size_t r, std::span<double> out) {
    const auto w = sample_wiener(grid, 1, ensemble.seed, r);
    const auto b = sample_wiener(grid, 1, ensemble.seed, r, Channel::auxiliary);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const auto wn = coupling.identity() ? w : couple(w, b, coupling.coefficient(ns[i]));
      const double x = ito_integral(spikes[i], wn)[0];
      out[2 * i] = x;
      out[2 * i + 1] = std::abs(x) > 1.959963984540054 ? 1.0 : 0.0;
    }
  });
  const auto g = GridFunction::sample(grid, [](double t) { return t; });
  std::vector<SpikeResult> res;
  const double count = static_cast<double>(ensemble.samples);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    SpikeResult s;
    s.n = ns[i];
    const auto x = table.column(2 * i);
    s.mean = estimate_mean(x);
    std::vector<double> dev2(x.size()), dev4(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) {
      const double d = x[r] - s.mean.mean;
      dev2[r] = d * d;
      dev4[r] = d * d * d * d;
    }
    s.variance = pairwise_sum(dev2) / (count - 1.0);
    const double m4 = pairwise_sum(dev4) / count;
    s.variance_stderr = std::sqrt(std::max(m4 - s.variance * s.variance, 0.0) / count);
    s.tail = table.mean(2 * i + 1).mean;
    s.norm_sq = quadratic_integral(spikes[i]);
    s.pairing_t = time_pairing(spikes[i], g);
    res.push_back(s);
  }
  return res;
}

Trend assess_trend(const std::vector<std::size_t>& ns, const std::vector<double>& values, double slope_limit,
                   double ratio_limit) {
  if (ns.size() != values.size() || ns.size() < 2) throw ConfigError("trend needs at least two (n, value) points");
  Trend t;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    x.push_back(std::log(static_cast<double>(ns[i])));
    y.push_back(std::log(std::max(values[i], 1e-300)));
  }
  t.slope = fit_line(x, y).slope;
  t.ratio = values.front() > 0.0 ? values.back() / values.front() : 0.0;
  t.decreasing = t.slope <= slope_limit || values.back() <= ratio_limit * values.front();
  return t;
}

}  // namespace stochlab
