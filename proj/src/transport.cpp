#include "stochlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/ito.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/rng.hpp"
#include "stochlab/spectral.hpp"

namespace stochlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Point cell_point(const TorusGrid& g, std::size_t i) {
  return {g.center(i, 0), g.dim() == 2 ? g.center(i, 1) : 0.0};
}

Point face_point(const TorusGrid& g, std::size_t i, std::size_t axis) {
  Point x = cell_point(g, i);
  x[axis] += 0.5 * g.dx();
  return x;
}

double energy_of(std::span<const double> u, double volume) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return 0.5 * s * volume;
}

// sigma at one cell, into out (k values).
void noise_at(const Noise& noise, double t, Point x, double u, std::span<double> out) {
  switch (noise.kind) {
    case Noise::Kind::none: std::fill(out.begin(), out.end(), 0.0); break;
    case Noise::Kind::multiplicative: noise.coefficient(u, out); break;
    case Noise::Kind::additive: noise.field(t, x, out); break;
  }
}

}  // namespace

Noise Noise::none(std::size_t dim) {
  Noise n;
  n.dim = dim;
  return n;
}

Noise Noise::multiplicative(std::size_t dim, std::function<void(double, std::span<double>)> f, double lipschitz,
                            double bound) {
  Noise n;
  n.kind = Kind::multiplicative;
  n.dim = dim;
  n.coefficient = std::move(f);
  n.lipschitz = lipschitz;
  n.bound = bound;
  return n;
}

Noise Noise::additive(std::size_t dim, std::function<void(double, Point, std::span<double>)> f, double bound) {
  Noise n;
  n.kind = Kind::additive;
  n.dim = dim;
  n.field = std::move(f);
  n.bound = bound;
  return n;
}

void TransportProblem::validate() const {
  if (!velocity || !divergence || !initial) throw ConfigError("transport problem needs b, div b and u0");
  if (viscosity < 0.0) throw ConfigError("viscosity must be nonnegative");
  if (noise.kind == Noise::Kind::multiplicative && !noise.coefficient)
    throw ConfigError("multiplicative noise needs a coefficient");
  if (noise.kind == Noise::Kind::additive && !noise.field) throw ConfigError("additive noise needs a field");
  const std::size_t n = grid.cells_per_dim();
  std::vector<double> div(grid.cells(), 0.0);
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    const std::size_t lines = grid.dim() == 1 ? 1 : n;
    for (std::size_t l = 0; l < lines; ++l) {
      std::vector<std::size_t> idx(n);
      std::size_t i = a == 0 ? l * n : l;
      for (auto& k : idx) {
        k = i;
        i = grid.neighbor(i, a, +1);
      }
      std::vector<double> b(n);
      for (std::size_t k = 0; k < n; ++k) b[k] = velocity(0.0, cell_point(grid, idx[k]))[a];
      const auto d = spectral::derivative(b, 1);
      for (std::size_t k = 0; k < n; ++k) div[idx[k]] += d[k];
    }
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < grid.cells(); ++i) scale = std::max(scale, std::abs(divergence(0.0, cell_point(grid, i))));
  for (std::size_t i = 0; i < grid.cells(); ++i)
    if (std::abs(div[i] - divergence(0.0, cell_point(grid, i))) > 1e-6 * scale)
      throw ConfigError("div b is inconsistent with b at cell " + std::to_string(i) + " of " +
                        std::to_string(grid.cells()) + " (unresolved coefficients?)");
}

FieldPath::FieldPath(TorusGrid grid, TimeGrid times, std::vector<double> values)
    : grid_(grid), times_(times), values_(std::move(values)) {
  if (values_.size() != snapshots() * grid_.cells()) throw GridMismatch("field path needs snapshots * cells values");
  energy_.resize(snapshots());
  for (std::size_t j = 0; j < snapshots(); ++j) {
    for (double x : at(j))
      if (!std::isfinite(x)) throw NumericalBlowup(j);
    energy_[j] = energy_of(at(j), grid_.cell_volume());
  }
}

double FieldPath::mass(std::size_t j) const {
  double s = 0.0;
  for (double x : at(j)) s += x;
  return s * grid_.cell_volume();
}

double FieldPath::energy_drift() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < snapshots(); ++j)
    worst = std::max(worst, std::abs(energy_[j] - energy_of(at(j), grid_.cell_volume())));
  return worst;
}

FieldPath FieldPath::coarsened(std::size_t factor) const {
  const std::size_t n = grid_.cells_per_dim();
  if (factor == 0 || n % factor != 0) throw ConfigError("coarsening factor must divide the cell count");
  const TorusGrid coarse(n / factor, grid_.dim());
  const std::size_t nc = coarse.cells_per_dim();
  std::vector<double> out(snapshots() * coarse.cells(), 0.0);
  const double w = grid_.dim() == 1 ? 1.0 / static_cast<double>(factor) : 1.0 / static_cast<double>(factor * factor);
  for (std::size_t j = 0; j < snapshots(); ++j) {
    const auto u = at(j);
    double* dst = out.data() + j * coarse.cells();
    for (std::size_t i = 0; i < grid_.cells(); ++i) {
      const std::size_t ix = (i % n) / factor;
      const std::size_t iy = grid_.dim() == 1 ? 0 : (i / n) / factor;
      dst[ix + iy * nc] += w * u[i];
    }
  }
  return {coarse, times_, std::move(out)};
}

double cfl_number(const TransportProblem& problem, const TimeGrid& grid) {
  const auto& g = problem.grid;
  const std::size_t times = problem.steady ? 1 : grid.steps();
  double speed = 0.0;
  for (std::size_t j = 0; j < times; ++j) {
    double s = 0.0;
    for (std::size_t a = 0; a < g.dim(); ++a) {
      double m = 0.0;
      for (std::size_t i = 0; i < g.cells(); ++i)
        m = std::max(m, std::abs(problem.velocity(grid.time(j), face_point(g, i, a))[a]));
      s += m;
    }
    speed = std::max(speed, s);
  }
  const double dt = grid.dt();
  const double dx = g.dx();
  return speed * dt / dx + 2.0 * static_cast<double>(g.dim()) * problem.viscosity * dt / (dx * dx);
}

FieldPath solve_transport(const TransportProblem& problem, const WienerPath& w, std::uint64_t seed,
                          std::size_t replica, SolveOptions options) {
  const auto& g = problem.grid;
  const TimeGrid& tg = w.grid();
  const std::size_t steps = tg.steps();
  if (problem.noise.kind != Noise::Kind::none && problem.noise.dim != w.dim())
    throw GridMismatch("noise dimension differs from the Wiener path dimension");
  if (options.store_stride == 0 || steps % options.store_stride != 0)
    throw ConfigError("store stride must divide the number of time steps");
  const double cfl = cfl_number(problem, tg);
  if (cfl > options.cfl_limit) throw CflError(cfl, options.cfl_limit);

  const std::size_t cells = g.cells();
  const std::size_t dim = g.dim();
  const std::size_t k = w.dim();
  const double dt = tg.dt();
  const double lambda = dt / g.dx();
  const double mu = problem.viscosity * dt / (g.dx() * g.dx());
  const double om = omega0(seed, replica);

  std::vector<std::array<std::size_t, 2>> up(cells), down(cells);
  std::vector<Point> centers(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    centers[i] = cell_point(g, i);
    for (std::size_t a = 0; a < dim; ++a) {
      up[i][a] = g.neighbor(i, a, +1);
      down[i][a] = g.neighbor(i, a, -1);
    }
  }
  std::vector<double> face(dim * cells), source(cells, 0.0), additive(cells * k, 0.0);
  const auto refresh = [&](double t) {
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t i = 0; i < cells; ++i) face[a * cells + i] = problem.velocity(t, face_point(g, i, a))[a];
    if (problem.source)
      for (std::size_t i = 0; i < cells; ++i) source[i] = problem.source(t, centers[i]);
    if (problem.noise.kind == Noise::Kind::additive)
      for (std::size_t i = 0; i < cells; ++i) problem.noise.field(t, centers[i], {additive.data() + i * k, k});
  };
  refresh(0.0);

  std::vector<double> u(cells), next(cells), flux(dim * cells), sig(k), dw(k);
  for (std::size_t i = 0; i < cells; ++i) u[i] = problem.initial(centers[i], om);
  const std::size_t stored = steps / options.store_stride + 1;
  std::vector<double> values(stored * cells);
  std::copy(u.begin(), u.end(), values.begin());

  for (std::size_t j = 0; j < steps; ++j) {
    if (!problem.steady && j > 0) refresh(tg.time(j));
    for (std::size_t c = 0; c < k; ++c) dw[c] = w.increment(j, c);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t i = 0; i < cells; ++i) {
        const double b = face[a * cells + i];
        flux[a * cells + i] = b > 0.0 ? b * u[i] : b * u[up[i][a]];
      }
    for (std::size_t i = 0; i < cells; ++i) {
      double v = u[i] + dt * source[i];
      for (std::size_t a = 0; a < dim; ++a) {
        v -= lambda * (flux[a * cells + i] - flux[a * cells + down[i][a]]);
        v += mu * (u[up[i][a]] - 2.0 * u[i] + u[down[i][a]]);
      }
      switch (problem.noise.kind) {
        case Noise::Kind::none: break;
        case Noise::Kind::multiplicative:
          problem.noise.coefficient(u[i], sig);
          for (std::size_t c = 0; c < k; ++c) v += sig[c] * dw[c];
          break;
        case Noise::Kind::additive:
          for (std::size_t c = 0; c < k; ++c) v += additive[i * k + c] * dw[c];
          break;
      }
      next[i] = v;
    }
    for (double x : next)
      if (!std::isfinite(x)) throw NumericalBlowup(j);
    u.swap(next);
    if ((j + 1) % options.store_stride == 0)
      std::copy(u.begin(), u.end(), values.begin() + static_cast<std::ptrdiff_t>((j + 1) / options.store_stride * cells));
  }
  return {g, TimeGrid(tg.horizon(), steps / options.store_stride), std::move(values)};
}

double weak_residual(const FieldPath& u, const TransportProblem& problem, const WienerPath& w,
                     const TestFunction& phi, std::size_t node) {
  const auto& g = u.grid();
  if (!(u.times() == w.grid())) throw GridMismatch("weak residual needs every time step stored");
  if (!(phi.grid() == g) || !(problem.grid == g)) throw GridMismatch("weak residual: spatial grids differ");
  if (node >= u.snapshots()) throw ConfigError("weak residual node out of range");
  const std::size_t cells = g.cells();
  const double dv = g.cell_volume();
  const double dt = w.grid().dt();
  const std::size_t k = w.dim();
  const auto& p = phi.values();
  const auto& lap = phi.laplacian();

  std::vector<Point> centers(cells);
  for (std::size_t i = 0; i < cells; ++i) centers[i] = cell_point(g, i);
  double r = 0.0;
  for (std::size_t i = 0; i < cells; ++i) r += (u.at(node)[i] - u.at(0)[i]) * p[i] * dv;
  std::vector<double> sig(k);
  for (std::size_t j = 0; j < node; ++j) {
    const double t = w.grid().time(j);
    const auto uj = u.at(j);
    double drift = 0.0;
    std::vector<double> stoch(k, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      const Point b = problem.velocity(t, centers[i]);
      double bgrad = 0.0;
      for (std::size_t a = 0; a < g.dim(); ++a) bgrad += b[a] * phi.gradient(a)[i];
      drift += bgrad * uj[i] + problem.viscosity * lap[i] * uj[i];
      if (problem.source) drift += problem.source(t, centers[i]) * p[i];
      if (problem.noise.kind != Noise::Kind::none) {
        noise_at(problem.noise, t, centers[i], uj[i], sig);
        for (std::size_t c = 0; c < k; ++c) stoch[c] += sig[c] * p[i];
      }
    }
    r -= drift * dv * dt;
    for (std::size_t c = 0; c < k; ++c) r -= stoch[c] * dv * w.increment(j, c);
  }
  return r;
}

std::vector<double> energy_trace(const FieldPath& u) { return u.energy(); }

std::vector<double> renormalized_pairing(const FieldPath& u, const TestFunction& psi,
                                         const std::function<double(double)>& theta) {
  if (!(psi.grid() == u.grid())) throw GridMismatch("renormalized pairing: grids differ");
  std::vector<double> out(u.snapshots());
  const double dv = u.grid().cell_volume();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto uj = u.at(j);
    double s = 0.0;
    for (std::size_t i = 0; i < uj.size(); ++i) s += psi.values()[i] * theta(uj[i]);
    out[j] = s * dv;
  }
  return out;
}

VarianceCheck variance_inequality(std::span<const double> u, const std::function<double(double)>& sigma,
                                  double lipschitz) {
  if (u.size() < 2) throw ConfigError("variance inequality needs at least two samples");
  std::vector<double> s(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) s[i] = sigma(u[i]);
  const double n = static_cast<double>(u.size());
  const double mean_u = pairwise_sum(u) / n;
  const double mean_s = pairwise_sum(s) / n;
  const double s_at_mean = sigma(mean_u);
  std::vector<double> a(u.size()), b(u.size()), c(u.size()), d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    a[i] = (s[i] - mean_s) * (s[i] - mean_s);
    b[i] = (s[i] - s_at_mean) * (s[i] - s_at_mean);
    c[i] = (u[i] - mean_u) * (u[i] - mean_u);
    d[i] = b[i] - a[i];
  }
  VarianceCheck v;
  v.variance = pairwise_sum(a) / n;
  v.about_mean = pairwise_sum(b) / n;
  v.lipschitz_bound = lipschitz * lipschitz * pairwise_sum(c) / n;
  v.stderr_ = estimate_mean(d).stderr_;
  return v;
}

TransportFamily::NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return TransportFamily::NoiseKind::none;
  if (name == "multiplicative") return TransportFamily::NoiseKind::multiplicative;
  if (name == "additive") return TransportFamily::NoiseKind::additive;
  throw ConfigError("unknown noise kind '" + name + "' (accepted: none, multiplicative, additive)");
}

TransportProblem TransportFamily::problem(const TorusGrid& grid, std::size_t n) const {
  if (grid.dim() != dim) throw GridMismatch("transport family and grid dimensions differ");
  const double inv = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  const double freq = two_pi * static_cast<double>(n);
  TransportProblem pr;
  pr.grid = grid;
  const double c = drift, a = swing, vp = velocity_perturbation * inv * inv;
  pr.velocity = [=](double, Point x) {
    return Point{c + a * std::sin(two_pi * x[0]) + vp * std::sin(freq * x[0]), 0.0};
  };
  pr.divergence = [=](double, Point x) {
    return two_pi * a * std::cos(two_pi * x[0]) + vp * freq * std::cos(freq * x[0]);
  };
  const double fo = forcing, sp = source_perturbation * inv;
  if (fo != 0.0 || sp != 0.0)
    pr.source = [=](double, Point x) { return fo * std::sin(two_pi * x[0]) + sp * std::sin(freq * x[0]); };
  const double ip = initial_perturbation * inv, ir = initial_randomness;
  pr.initial = [=](Point x, double om) {
    return 1.0 + 0.5 * std::sin(two_pi * x[0]) + ip * std::cos(freq * x[0]) + ir * (om - 0.5);
  };
  const double s = noise_amplitude;
  switch (noise) {
    case NoiseKind::none: pr.noise = Noise::none(1); break;
    case NoiseKind::multiplicative:
      pr.noise = Noise::multiplicative(
          2,
          [s](double u, std::span<double> out) {
            out[0] = s * std::sin(u);
            out[1] = s * std::cos(u);
          },
          s, s);
      break;
    case NoiseKind::additive: {
      const double np = noise_perturbation * inv;
      pr.noise = Noise::additive(
          1, [=](double, Point x, std::span<double> out) { out[0] = s * (1.0 + 0.5 * std::sin(two_pi * x[0])) + np * std::sin(freq * x[0]); },
          1.5 * std::abs(s) + std::abs(np));
      break;
    }
  }
  pr.viscosity = viscosity_scale * inv;
  pr.exponents = ExponentSet(p);
  pr.steady = true;
  return pr;
}

TestFunction TransportFamily::psi(const TorusGrid& grid) const {
  return TestFunction::from_analytic(
      grid, [](Point x) { return 1.0 + 0.5 * std::cos(two_pi * x[0]); },
      [](Point x) { return Point{-0.5 * two_pi * std::sin(two_pi * x[0]), 0.0}; },
      [](Point x) { return -0.5 * two_pi * two_pi * std::cos(two_pi * x[0]); });
}

double gronwall_bound(const TransportProblem& problem, double horizon) {
  constexpr std::size_t points = 1024;
  constexpr std::size_t omegas = 64;
  double div_sup = 0.0, f_sq = 0.0, u0_sq = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const Point x{(static_cast<double>(i) + 0.5) / points, 0.0};
    div_sup = std::max(div_sup, std::abs(problem.divergence(0.0, x)));
    if (problem.source) f_sq += std::pow(problem.source(0.0, x), 2) / points;
    for (std::size_t o = 0; o < omegas; ++o)
      u0_sq += std::pow(problem.initial(x, (static_cast<double>(o) + 0.5) / omegas), 2) / (points * omegas);
  }
  const double s = problem.noise.kind == Noise::Kind::none ? 0.0 : problem.noise.bound;
  const double a = u0_sq + horizon * (f_sq + s * s);
  const double rate = (div_sup + 1.0) * horizon;
  const double mean_bound = a * std::exp(rate);
  return a + rate * mean_bound + 6.0 * s * std::sqrt(horizon * mean_bound);
}

namespace {

double sup_distance_of(const std::function<double(Point)>& f, const std::function<double(Point)>& g) {
  double m = 0.0;
  for (std::size_t i = 0; i < 1024; ++i) {
    const Point x{(static_cast<double>(i) + 0.5) / 1024.0, 0.0};
    m = std::max(m, std::abs(f(x) - g(x)));
  }
  return m;
}

double l2_distance_of(const std::function<double(Point)>& f, const std::function<double(Point)>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < 1024; ++i) {
    const Point x{(static_cast<double>(i) + 0.5) / 1024.0, 0.0};
    s += std::pow(f(x) - g(x), 2) / 1024.0;
  }
  return std::sqrt(s);
}

// Pairings <psi, sigma_c(u(t_j))> and <psi, u sigma_c(u)> on the left nodes as 1 x k processes.
std::pair<AdaptedProcess, AdaptedProcess> noise_pairings(const FieldPath& u, const TransportProblem& problem,
                                                         const TestFunction& psi, std::size_t k) {
  const auto& g = u.grid();
  const TimeGrid& tg = u.times();
  const double dv = g.cell_volume();
  std::vector<double> sig(k);
  std::vector<double> a(tg.steps() * k, 0.0), b(tg.steps() * k, 0.0);
  for (std::size_t j = 0; j < tg.steps(); ++j) {
    const auto uj = u.at(j);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      noise_at(problem.noise, tg.time(j), cell_point(g, i), uj[i], sig);
      for (std::size_t c = 0; c < k; ++c) {
        a[j * k + c] += psi.values()[i] * sig[c] * dv;
        b[j * k + c] += psi.values()[i] * uj[i] * sig[c] * dv;
      }
    }
  }
  std::vector<long> revealed(tg.steps());
  for (std::size_t j = 0; j < tg.steps(); ++j) revealed[j] = static_cast<long>(j);
  const auto shape = ProcessShape::matrix(1, k);
  return {AdaptedProcess(tg, shape, std::move(a), revealed, source_wiener | source_auxiliary),
          AdaptedProcess(tg, shape, std::move(b), revealed, source_wiener | source_auxiliary)};
}

bool converging(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (top <= 1e-12) return true;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1.0 + 1e-12)) return false;
  return v.back() <= 0.5 * v.front();
}

const std::vector<TestVariable> positive_ys = {TestVariable::one, TestVariable::w_terminal_sq,
                                               TestVariable::sin_omega};

double positive_y(TestVariable y, const WienerPath& w, double om) {
  if (y == TestVariable::w_terminal_sq) {
    const double wt = w.at(w.grid().steps(), 0);
    return wt * wt;
  }
  if (y == TestVariable::sin_omega) return 1.0 + std::sin(two_pi * om);
  return 1.0;
}

}  // namespace

StabilityReport stability_experiment(const TransportFamily& family, const StabilityConfig& config) {
  if (config.ns.size() < 2) throw ConfigError("stability experiment needs at least two n values");
  if (config.ensemble.samples == 0) throw ConfigError("stability experiment needs samples >= 1");
  const TorusGrid coarse(config.cells, family.dim);
  const TorusGrid fine(config.cells * config.refine, family.dim);
  const TimeGrid coarse_t(config.horizon, config.steps);
  const TimeGrid fine_t(config.horizon, config.steps * config.refine);
  const auto limit_fine = family.problem(fine, 0);
  const auto limit = family.problem(coarse, 0);
  limit_fine.validate();
  std::vector<TransportProblem> problems;
  for (std::size_t n : config.ns) {
    problems.push_back(family.problem(coarse, n));
    problems.back().validate();
  }
  const std::size_t k = limit.noise.dim;
  const auto psi = family.psi(coarse);
  const std::vector<TestVariable>& ys = config.ys;
  const std::size_t ny = ys.size();
  const std::size_t per_n = 2 + 2 * ny + positive_ys.size();
  const double p = family.p;
  const double dv = coarse.cell_volume();
  const double dt = coarse_t.dt();

  const auto table = parallel::map_replicas(
      config.ensemble.samples, per_n * config.ns.size(), [&](std::size_t r, std::span<double> out) {
        const std::uint64_t seed = config.ensemble.seed;
        const auto wf = sample_wiener(fine_t, k, seed, r);
        const auto ref = solve_transport(limit_fine, wf, seed, r, {config.refine, 0.9}).coarsened(config.refine);
        const auto wc = wf.restricted(config.refine);
        const auto bc = sample_wiener(coarse_t, k, seed, r, Channel::auxiliary);
        const double om = omega0(seed, r);
        const auto [ref_sigma, ref_eta] = noise_pairings(ref, limit, psi, k);
        const auto i_sigma = ito_integral(ref_sigma, wc)[0];
        const auto i_eta = ito_integral(ref_eta, wc)[0];
        std::vector<double> sn(k), sr(k);
        for (std::size_t idx = 0; idx < config.ns.size(); ++idx) {
          const auto& pr = problems[idx];
          const double a = config.coupling.coefficient(config.ns[idx]);
          const auto wn = a == 0.0 ? wc : couple(wc, bc, a);
          const auto un = solve_transport(pr, wn, seed, r);
          auto row = out.subspan(idx * per_n, per_n);

          double lp = 0.0, esup = 0.0, nonpos = 0.0;
          for (std::size_t j = 0; j < un.snapshots(); ++j) {
            const auto x = un.at(j);
            const auto y = ref.at(j);
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
            const double tw = (j == 0 || j + 1 == un.snapshots()) ? 0.5 : 1.0;
            lp += tw * s * dv * dt;
            esup = std::max(esup, 2.0 * un.energy()[j]);
            if (j + 1 < un.snapshots())
              for (std::size_t i = 0; i < x.size(); ++i) {
                const Point pt = cell_point(coarse, i);
                noise_at(pr.noise, coarse_t.time(j), pt, x[i], sn);
                noise_at(limit.noise, coarse_t.time(j), pt, y[i], sr);
                double d2 = 0.0;
                for (std::size_t c = 0; c < k; ++c) d2 += (sn[c] - sr[c]) * (sn[c] - sr[c]);
                nonpos -= std::abs(psi.values()[i]) * d2 * dv * dt;
              }
          }
          row[0] = lp;
          row[1] = esup;
          const auto [n_sigma, n_eta] = noise_pairings(un, pr, psi, k);
          const double d_sigma = ito_integral(n_sigma, wn)[0] - i_sigma;
          const double d_eta = ito_integral(n_eta, wn)[0] - i_eta;
          for (std::size_t q = 0; q < ny; ++q) {
            const double yv = evaluate(ys[q], wc, om);
            row[2 + q] = yv * d_sigma;
            row[2 + ny + q] = yv * d_eta;
          }
          for (std::size_t q = 0; q < positive_ys.size(); ++q)
            row[2 + 2 * ny + q] = positive_y(positive_ys[q], wc, om) * nonpos;
        }
      });

  StabilityReport rep;
  const auto best_of = [&](std::size_t offset, std::size_t count, const std::vector<TestVariable>& names,
                           bool signed_max) {
    GapStatistic g;
    g.samples = table.rows();
    bool first = true;
    for (std::size_t q = 0; q < count; ++q) {
      const auto e = table.mean(offset + q);
      const double v = signed_max ? e.mean + 3.0 * e.stderr_ : std::abs(e.mean);
      if (first || v > (signed_max ? g.value + 3.0 * g.stderr_ : g.value)) {
        g.value = signed_max ? e.mean : std::abs(e.mean);
        g.stderr_ = e.stderr_;
        g.witness = to_string(names[q]);
        first = false;
      }
    }
    return g;
  };

  std::vector<double> vel, div, src, ini, divsup, lps;
  const auto lim_b = [&](Point x) { return limit.velocity(0.0, x)[0]; };
  const auto lim_div = [&](Point x) { return limit.divergence(0.0, x); };
  const auto lim_f = [&](Point x) { return limit.source ? limit.source(0.0, x) : 0.0; };
  const auto lim_u0 = [&](Point x) { return limit.initial(x, 0.5); };
  for (std::size_t idx = 0; idx < config.ns.size(); ++idx) {
    const auto& pr = problems[idx];
    StabilityEntry e;
    e.n = config.ns[idx];
    const std::size_t base = idx * per_n;
    const auto lp = table.mean(base);
    e.lp_distance = std::pow(lp.mean, 1.0 / p);
    e.lp_stderr = e.lp_distance > 0.0 ? lp.stderr_ / (p * std::pow(e.lp_distance, p - 1.0)) : 0.0;
    e.energy_sup = table.mean(base + 1);
    e.gronwall = gronwall_bound(pr, config.horizon);
    if (ny > 0) {
      e.sigma_gap = best_of(base + 2, ny, ys, false);
      e.eta_gap = best_of(base + 2 + ny, ny, ys, false);
    }
    e.sign_pairing = best_of(base + 2 + 2 * ny, positive_ys.size(), positive_ys, true);
    e.sign_preserved = e.sign_pairing.value <= 3.0 * e.sign_pairing.stderr_;
    e.velocity_distance = sup_distance_of([&](Point x) { return pr.velocity(0.0, x)[0]; }, lim_b);
    e.divergence_distance = sup_distance_of([&](Point x) { return pr.divergence(0.0, x); }, lim_div);
    e.source_distance = l2_distance_of([&](Point x) { return pr.source ? pr.source(0.0, x) : 0.0; }, lim_f);
    e.initial_distance = l2_distance_of([&](Point x) { return pr.initial(x, 0.5); }, lim_u0);
    e.divergence_sup = sup_distance_of([&](Point x) { return pr.divergence(0.0, x); }, [](Point) { return 0.0; });
    vel.push_back(e.velocity_distance);
    div.push_back(e.divergence_distance);
    src.push_back(e.source_distance);
    ini.push_back(e.initial_distance);
    divsup.push_back(e.divergence_sup);
    lps.push_back(e.lp_distance);
    if (e.energy_sup.mean > e.gronwall + 3.0 * e.energy_sup.stderr_)
      rep.monitor_failures.push_back("energy bound exceeded at n=" + std::to_string(e.n));
    if (!e.sign_preserved) rep.monitor_failures.push_back("sign lost in weak limit at n=" + std::to_string(e.n));
    rep.entries.push_back(e);
  }
  if (!converging(vel)) rep.monitor_failures.push_back("b_n does not approach b");
  if (!converging(div)) rep.monitor_failures.push_back("div b_n does not approach div b");
  if (!converging(src)) rep.monitor_failures.push_back("f_n does not approach f");
  if (!converging(ini)) rep.monitor_failures.push_back("u0_n does not approach u0");
  const double lim_divsup = sup_distance_of(lim_div, [](Point) { return 0.0; });
  if (*std::max_element(divsup.begin(), divsup.end()) >
      config.bounded_factor * std::max(lim_divsup, divsup.front()) + 1e-12)
    rep.monitor_failures.push_back("||div b_n|| grows along the ladder");
  rep.trend = assess_trend(config.ns, lps);

  // Conservation: the first problem of the ladder with f = 0 and sigma = 0.
  auto quiet = problems.front();
  quiet.source = nullptr;
  quiet.noise = Noise::none(k);
  const auto u = solve_transport(quiet, sample_wiener(coarse_t, k, config.ensemble.seed, 0), config.ensemble.seed, 0);
  for (std::size_t j = 0; j < u.snapshots(); ++j) rep.mass_drift = std::max(rep.mass_drift, std::abs(u.mass(j) - u.mass(0)));
  return rep;
}

PathEnsemble transport_pairing_paths(const TransportFamily& family, const StabilityConfig& config, std::size_t n) {
  const TorusGrid grid(config.cells, family.dim);
  const TimeGrid tg(config.horizon, config.steps);
  const auto pr = family.problem(grid, n);
  pr.validate();
  const auto psi = family.psi(grid);
  const std::size_t k = pr.noise.dim;
  const double a = config.coupling.coefficient(n);
  auto table = parallel::map_replicas(config.ensemble.samples, tg.steps() + 1, [&](std::size_t r, std::span<double> out) {
    const auto w = sample_wiener(tg, k, config.ensemble.seed, r);
    const auto wn = a == 0.0 ? w : couple(w, sample_wiener(tg, k, config.ensemble.seed, r, Channel::auxiliary), a);
    const auto u = solve_transport(pr, wn, config.ensemble.seed, r);
    const auto f = renormalized_pairing(u, psi, [](double v) { return v * std::sin(v); });
    std::copy(f.begin(), f.end(), out.begin());
  });
  return {tg, config.ensemble.samples, table.data()};
}

}  // namespace stochlab
