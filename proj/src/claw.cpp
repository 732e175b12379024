#include "stochlab/claw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/ito.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/rng.hpp"

namespace stochlab {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

FluxFunction flux_family(const std::string& kind, double perturbation) {
  const double q = perturbation;
  if (kind == "burgers")
    return {[q](double u) { return 0.5 * u * u + q * u * u * u / 3.0; }, [q](double u) { return u + q * u * u; }};
  if (kind == "cubic")
    return {[q](double u) { return (1.0 + q) * u * u * u / 3.0; }, [q](double u) { return (1.0 + q) * u * u; }};
  if (kind == "linear")
    return {[q](double u) { return u + q * u * u * u / 3.0; }, [q](double u) { return 1.0 + q * u * u; }};
  throw ConfigError("unknown flux '" + kind + "' (accepted: burgers, cubic, linear)");
}

Primitive::Primitive(const std::function<double(double)>& h, double lo, double hi, std::size_t intervals)
    : lo_(lo), hi_(hi), step_((hi - lo) / static_cast<double>(intervals)), table_(intervals + 1, 0.0) {
  if (!(hi > lo) || intervals == 0) throw ConfigError("primitive needs lo < hi and at least one interval");
  for (std::size_t i = 0; i < intervals; ++i) {
    const double a = lo + step_ * static_cast<double>(i);
    const double q = step_ / 4.0;
    const double panel =
        (h(a) + 4.0 * h(a + q) + 2.0 * h(a + 2.0 * q) + 4.0 * h(a + 3.0 * q) + h(a + step_)) * q / 3.0;
    table_[i + 1] = table_[i] + panel;
  }
}

double Primitive::operator()(double u) const {
  const double s = std::clamp((u - lo_) / step_, 0.0, static_cast<double>(table_.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(s), table_.size() - 2);
  const double frac = s - static_cast<double>(i);
  return table_[i] + frac * (table_[i + 1] - table_[i]);
}

EngquistOsherFlux::EngquistOsherFlux(const FluxFunction& flux, double lo, double hi, std::size_t intervals)
    : base_(flux.f(lo)),
      plus_([&](double u) { return std::max(flux.df(u), 0.0); }, lo, hi, intervals),
      minus_([&](double u) { return std::min(flux.df(u), 0.0); }, lo, hi, intervals) {}

KineticWindow kinetic_window(double u_min, double u_max, double noise_sd) {
  const double centre = 0.5 * (u_min + u_max);
  const double half = (u_max - u_min) + 4.0 * noise_sd;
  if (!(half > 0.0)) throw ConfigError("kinetic window is empty");
  return {centre - half, centre + half};
}

std::vector<double> kappa_ladder(double lo, double hi, std::size_t levels) {
  if (levels == 0 || !(hi > lo)) throw ConfigError("kappa ladder needs levels >= 1 and lo < hi");
  std::vector<double> k(levels);
  const double d = (hi - lo) / static_cast<double>(levels);
  for (std::size_t l = 0; l < levels; ++l) k[l] = lo + (static_cast<double>(l) + 0.5) * d;
  return k;
}

void KineticProblem::validate() const {
  if (grid.dim() != 1) throw ConfigError("the conservation-law solver is one-dimensional");
  if (!flux.f || !flux.df || !initial) throw ConfigError("kinetic problem needs F, F' and u0");
  if (!(window.hi > window.lo)) throw ConfigError("kinetic window is empty");
  if (viscosity < 0.0) throw ConfigError("viscosity must be nonnegative");
  if (sigma && !sigma_derivative) throw ConfigError("sigma needs its derivative");
  constexpr std::size_t probes = 64;
  constexpr double h = 1e-5;
  std::vector<double> sp(noise_dim), sm(noise_dim), ds(noise_dim);
  for (std::size_t i = 0; i <= probes; ++i) {
    const double xi = window.lo + (window.hi - window.lo) * static_cast<double>(i) / probes;
    const double fd = (flux.f(xi + h) - flux.f(xi - h)) / (2.0 * h);
    if (std::abs(fd - flux.df(xi)) > 1e-6 * std::max(1.0, std::abs(fd)))
      throw ConfigError("F' is inconsistent with F at xi = " + std::to_string(xi));
    if (sigma) {
      sigma(xi + h, sp);
      sigma(xi - h, sm);
      sigma_derivative(xi, ds);
      for (std::size_t c = 0; c < noise_dim; ++c) {
        const double d = (sp[c] - sm[c]) / (2.0 * h);
        if (std::abs(d - ds[c]) > 1e-6 * std::max(1.0, std::abs(d)))
          throw ConfigError("sigma' is inconsistent with sigma at xi = " + std::to_string(xi));
      }
    }
  }
}

double KineticProblem::max_speed() const {
  double m = 0.0;
  for (std::size_t i = 0; i <= 4096; ++i)
    m = std::max(m, std::abs(flux.df(window.lo + (window.hi - window.lo) * static_cast<double>(i) / 4096.0)));
  return m;
}

KineticMeasure::KineticMeasure(std::size_t cells, KineticWindow window, std::size_t bins, std::vector<double> kappa)
    : cells_(cells),
      window_(window),
      bins_(bins),
      kappa_(std::move(kappa)),
      dkappa_(kappa_.empty() ? 0.0 : (window.hi - window.lo) / static_cast<double>(kappa_.size())),
      parabolic_(cells * bins, 0.0),
      entropy_(cells * kappa_.size(), 0.0) {
  if (bins == 0) throw ConfigError("kinetic measure needs at least one xi bin");
}

double KineticMeasure::bin_center(std::size_t l) const {
  return window_.lo + (static_cast<double>(l) + 0.5) * (window_.hi - window_.lo) / static_cast<double>(bins_);
}

void KineticMeasure::deposit_parabolic(std::size_t cell, double xi, double amount) {
  const double s = (xi - window_.lo) / (window_.hi - window_.lo) * static_cast<double>(bins_);
  const auto l = std::min(static_cast<std::size_t>(std::max(s, 0.0)), bins_ - 1);
  parabolic_[cell * bins_ + l] += amount;
}

double KineticMeasure::total_mass() const { return pairwise_sum(parabolic_) + pairwise_sum(entropy_); }

double KineticMeasure::min_bin() const {
  double m = 0.0;
  for (double x : parabolic_) m = std::min(m, x);
  for (double x : entropy_) m = std::min(m, x);
  return m;
}

double KineticMeasure::mass_in(const TorusGrid& grid, double x_lo, double x_hi) const {
  double s = 0.0;
  const std::size_t levels = kappa_.size();
  for (std::size_t i = 0; i < cells_; ++i) {
    const double x = grid.center(i);
    if (x < x_lo || x > x_hi) continue;
    for (std::size_t l = 0; l < bins_; ++l) s += parabolic_[i * bins_ + l];
    for (std::size_t l = 0; l < levels; ++l) s += entropy_[i * levels + l];
  }
  return s;
}

double KineticMeasure::pair(std::span<const double> a, const std::function<double(double)>& g) const {
  if (a.size() != cells_) throw GridMismatch("measure pairing: cell counts differ");
  std::vector<double> gb(bins_), gk(kappa_.size());
  for (std::size_t l = 0; l < bins_; ++l) gb[l] = g(bin_center(l));
  for (std::size_t l = 0; l < kappa_.size(); ++l) gk[l] = g(kappa_[l]);
  double s = 0.0;
  for (std::size_t i = 0; i < cells_; ++i) {
    double c = 0.0;
    for (std::size_t l = 0; l < bins_; ++l) c += parabolic_[i * bins_ + l] * gb[l];
    for (std::size_t l = 0; l < kappa_.size(); ++l) c += entropy_[i * kappa_.size() + l] * gk[l];
    s += a[i] * c;
  }
  return s;
}

ClawSolution solve_claw(const KineticProblem& problem, const WienerPath& w, std::uint64_t seed, std::size_t replica,
                        SolveOptions options) {
  const auto& g = problem.grid;
  if (g.dim() != 1) throw ConfigError("the conservation-law solver is one-dimensional");
  const TimeGrid& tg = w.grid();
  const std::size_t steps = tg.steps();
  if (problem.sigma && problem.noise_dim != w.dim())
    throw GridMismatch("noise dimension differs from the Wiener path dimension");
  if (options.store_stride == 0 || steps % options.store_stride != 0)
    throw ConfigError("store stride must divide the number of time steps");
  const double dt = tg.dt();
  const double dx = g.dx();
  const double lambda = dt / dx;
  const double mu = problem.viscosity * dt / (dx * dx);
  const double cfl = problem.max_speed() * lambda + 2.0 * mu;
  if (cfl > options.cfl_limit) throw CflError(cfl, options.cfl_limit);

  const EngquistOsherFlux eo(problem.flux, problem.window.lo, problem.window.hi);
  const std::size_t n = g.cells();
  const std::size_t k = problem.noise_dim;
  const double om = omega0(seed, replica);
  const auto right = [n](std::size_t i) { return i + 1 == n ? 0 : i + 1; };
  const auto left = [n](std::size_t i) { return i == 0 ? n - 1 : i - 1; };
  const auto check = [&](std::size_t step, const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) throw NumericalBlowup(step);
      if (x < problem.window.lo || x > problem.window.hi) throw RangeEscape(step, x);
    }
  };

  std::vector<double> u(n), eo_step(n), next(n), flux(n), q(n), sig(k);
  for (std::size_t i = 0; i < n; ++i) u[i] = problem.initial(g.center(i), om);
  check(0, u);
  KineticMeasure m(n, problem.window, problem.xi_bins, problem.kappa);
  const std::size_t levels = problem.kappa.size();
  m.mass_trace().assign(steps + 1, 0.0);
  double mass = 0.0;

  const std::size_t stored = steps / options.store_stride + 1;
  std::vector<double> values(stored * n);
  std::copy(u.begin(), u.end(), values.begin());

  for (std::size_t j = 0; j < steps; ++j) {
    for (std::size_t i = 0; i < n; ++i) flux[i] = eo(u[i], u[right(i)]);
    for (std::size_t i = 0; i < n; ++i) eo_step[i] = u[i] - lambda * (flux[i] - flux[left(i)]);
    for (std::size_t i = 0; i < n; ++i) {
      double v = eo_step[i] + mu * (u[right(i)] - 2.0 * u[i] + u[left(i)]);
      if (problem.sigma) {
        problem.sigma(u[i], sig);
        for (std::size_t c = 0; c < k; ++c) v += sig[c] * w.increment(j, c);
      }
      next[i] = v;
    }
    if (problem.track_measure) {
      if (problem.viscosity > 0.0)
        for (std::size_t i = 0; i < n; ++i) {
          const double grad = (u[right(i)] - u[i]) / dx;
          const double amount = problem.viscosity * grad * grad * dt * dx;
          m.deposit_parabolic(i, 0.5 * (u[i] + u[right(i)]), amount);
          mass += amount;
        }
      for (std::size_t l = 0; l < levels; ++l) {
        const double kap = problem.kappa[l];
        for (std::size_t i = 0; i < n; ++i) {
          const double a = u[i], b = u[right(i)];
          q[i] = eo(std::max(a, kap), std::max(b, kap)) - eo(std::min(a, kap), std::min(b, kap));
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double r = std::abs(eo_step[i] - kap) - std::abs(u[i] - kap) + lambda * (q[i] - q[left(i)]);
          if (r < 0.0) {
            const double amount = -0.5 * r * m.dkappa() * dx;
            m.entropy()[i * levels + l] += amount;
            mass += amount;
          }
        }
      }
    }
    m.mass_trace()[j + 1] = mass;
    check(j + 1, next);
    u.swap(next);
    if ((j + 1) % options.store_stride == 0)
      std::copy(u.begin(), u.end(), values.begin() + static_cast<std::ptrdiff_t>((j + 1) / options.store_stride * n));
  }
  return {FieldPath(g, TimeGrid(tg.horizon(), steps / options.store_stride), std::move(values)), std::move(m)};
}

KineticField::KineticField(FieldPath u, KineticWindow window, std::size_t bins)
    : u_(std::move(u)), window_(window), bins_(bins) {
  if (bins == 0) throw ConfigError("kinetic field needs at least one xi bin");
  for (std::size_t j = 0; j < u_.snapshots(); ++j)
    for (double x : u_.at(j))
      if (x < window.lo || x > window.hi) throw RangeEscape(j, x);
}

double KineticField::xi(std::size_t l) const { return window_.lo + static_cast<double>(l) * dxi(); }

double KineticField::layer(std::size_t j, std::size_t i, double a, double b) const {
  double s = 0.0;
  for (std::size_t l = 0; l <= bins_; ++l) {
    const double x = xi(l);
    if (x >= a && x < b) s += chi(j, i, l) * dxi();
  }
  return s;
}

bool KineticField::consistent(std::size_t every) const {
  if (every == 0) every = 1;
  for (std::size_t j = 0; j < u_.snapshots(); j += every)
    for (std::size_t i = 0; i < u_.grid().cells(); ++i) {
      int previous = 1;
      for (std::size_t l = 0; l <= bins_; ++l) {
        const int c = chi(j, i, l);
        if (c < 0 || c > 1 || c > previous) return false;
        previous = c;
      }
      if (std::abs(layer(j, i, window_.lo, window_.hi + dxi()) - (u_.at(j)[i] - window_.lo)) > dxi() + 1e-12)
        return false;
    }
  return true;
}

KineticField kinetic_function(const FieldPath& u, KineticWindow window, std::size_t bins) {
  return {u, window, bins};
}

double SeparableTest::b(double xi) const {
  const double z = (xi - centre) / width;
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - z * z));
}

double SeparableTest::db(double xi) const {
  const double z = (xi - centre) / width;
  if (std::abs(z) >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  return b(xi) * (-2.0 * z / (q * q)) / width;
}

double SeparableTest::d2b(double xi) const {
  const double z = (xi - centre) / width;
  if (std::abs(z) >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  const double g1 = -2.0 * z / (q * q);
  const double g2 = -2.0 / (q * q) - 8.0 * z * z / (q * q * q);
  return b(xi) * (g1 * g1 + g2) / (width * width);
}

SeparableTest bump_test(const TorusGrid& grid, double centre, double width) {
  constexpr double two_pi = 2.0 * pi;
  auto a = TestFunction::from_analytic(
      grid, [](Point x) { return 1.0 + 0.5 * std::sin(two_pi * x[0]); },
      [](Point x) { return Point{0.5 * two_pi * std::cos(two_pi * x[0]), 0.0}; },
      [](Point x) { return -0.5 * two_pi * two_pi * std::sin(two_pi * x[0]); });
  return {std::move(a), centre, width};
}

double kinetic_pairing(const FieldPath& u, std::size_t j, const SeparableTest& phi, const Primitive& b_primitive) {
  const auto uj = u.at(j);
  double s = 0.0;
  for (std::size_t i = 0; i < uj.size(); ++i) s += phi.a.values()[i] * b_primitive(uj[i]);
  return s * u.grid().cell_volume();
}

double noise_pairing(std::span<const double> u, const SeparableTest& phi, const KineticProblem& problem,
                     std::size_t c) {
  if (!problem.sigma) return 0.0;
  std::vector<double> sig(problem.noise_dim);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    problem.sigma(u[i], sig);
    s += phi.a.values()[i] * phi.b(u[i]) * sig[c];
  }
  return s * problem.grid.cell_volume();
}

double kinetic_residual(const ClawSolution& s, const KineticProblem& problem, const WienerPath& w,
                        const SeparableTest& phi) {
  const auto& u = s.u;
  if (!(u.times() == w.grid())) throw GridMismatch("kinetic residual needs every time step stored");
  const double lo = problem.window.lo, hi = problem.window.hi;
  const Primitive b_prim([&](double xi) { return phi.b(xi); }, lo, hi);
  const Primitive bf_prim([&](double xi) { return phi.b(xi) * problem.flux.df(xi); }, lo, hi);
  const std::size_t k = problem.noise_dim;
  const std::size_t steps = w.grid().steps();
  const double dt = w.grid().dt();
  const double dx = u.grid().cell_volume();
  const auto& a = phi.a.values();
  const auto& ax = phi.a.gradient(0);
  const auto& axx = phi.a.laplacian();
  std::vector<double> sig(k), dsig(k);

  double r = kinetic_pairing(u, steps, phi, b_prim) - kinetic_pairing(u, 0, phi, b_prim);
  for (std::size_t j = 0; j < steps; ++j) {
    const auto uj = u.at(j);
    double drift = 0.0;
    std::vector<double> stoch(k, 0.0);
    for (std::size_t i = 0; i < uj.size(); ++i) {
      const double v = uj[i];
      drift += ax[i] * bf_prim(v) + problem.viscosity * axx[i] * b_prim(v);
      if (problem.sigma) {
        problem.sigma(v, sig);
        double sq = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          stoch[c] += a[i] * phi.b(v) * sig[c];
          sq += sig[c] * sig[c];
        }
        drift += 0.5 * a[i] * sq * phi.db(v);
      }
    }
    r -= drift * dx * dt;
    for (std::size_t c = 0; c < k; ++c) r -= stoch[c] * dx * w.increment(j, c);
  }
  r += s.m.pair(a, [&](double xi) { return phi.db(xi); });
  return r;
}

KineticProblem ClawFamily::problem(const TorusGrid& grid, std::size_t n, double horizon) const {
  const double inv = n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
  KineticProblem pr;
  pr.grid = grid;
  pr.flux = flux_family(flux, flux_perturbation * inv);
  const double s = noise_amplitude, s2 = noise_perturbation * inv;
  if (s != 0.0 || s2 != 0.0) {
    pr.sigma = [=](double xi, std::span<double> out) { out[0] = s * std::sin(pi * xi) + s2 * std::sin(2.0 * pi * xi); };
    pr.sigma_derivative = [=](double xi, std::span<double> out) {
      out[0] = s * pi * std::cos(pi * xi) + s2 * 2.0 * pi * std::cos(2.0 * pi * xi);
    };
  }
  pr.viscosity = viscosity_scale * inv;
  pr.initial = [](double x, double) { return 0.5 + 0.25 * std::sin(2.0 * pi * x); };
  const double sd = (std::abs(s) + std::abs(s2)) * std::sqrt(horizon);
  pr.window = kinetic_window(0.25, 0.75, sd);
  pr.xi_bins = xi_bins;
  pr.kappa = kappa_ladder(pr.window.lo, pr.window.hi, kappa_levels);
  return pr;
}

SeparableTest ClawFamily::test(const TorusGrid& grid) const { return bump_test(grid, 0.4, 0.8); }

RiemannResult burgers_riemann(std::size_t cells, double horizon, std::size_t kappa_levels) {
  if (cells < 16) throw ConfigError("Riemann test needs at least 16 cells");
  if (horizon <= 0.0 || horizon >= 0.8) throw ConfigError("Riemann horizon must lie in (0, 0.8) before fan and shock meet");
  KineticProblem pr;
  pr.grid = TorusGrid(cells);
  pr.flux = flux_family("burgers");
  pr.initial = [](double x, double) { return x >= 0.1 && x < 0.5 ? 1.0 : 0.0; };
  pr.window = {-0.5, 1.5};
  pr.kappa = kappa_ladder(pr.window.lo, pr.window.hi, kappa_levels == 0 ? cells : kappa_levels);
  // dt = 0.4 dx, CFL 0.6 against the window speed 1.5
  const auto steps = static_cast<std::size_t>(std::ceil(horizon * 2.5 * static_cast<double>(cells)));
  const TimeGrid tg(horizon, steps);
  const WienerPath w(tg, 1, std::vector<double>(steps + 1, 0.0));
  const auto s = solve_claw(pr, w, 0, 0);

  RiemannResult r;
  r.cells = cells;
  r.dx = pr.grid.dx();
  r.horizon = horizon;
  for (std::size_t j = 0; j < s.u.snapshots(); ++j)
    for (double v : s.u.at(j))
      if (v < -1e-12 || v > 1.0 + 1e-12) r.max_principle = false;
  const auto u = s.u.at(steps);
  const double head = 0.1 + horizon;
  r.shock_position = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    const double x = pr.grid.center(i);
    if (x < head || x > 0.95) continue;
    if (u[i] >= 0.5 && u[i + 1] < 0.5) {
      r.shock_position = x + r.dx * (u[i] - 0.5) / (u[i] - u[i + 1]);
      break;
    }
  }
  r.shock_speed = (r.shock_position - 0.5) / horizon;
  r.fan_mass = s.m.mass_in(pr.grid, 0.05, 0.65);
  r.total_mass = s.m.total_mass();
  r.min_bin = s.m.min_bin();
  r.residual = std::abs(kinetic_residual(s, pr, w, ClawFamily{}.test(pr.grid)));
  return r;
}

namespace {

bool converging(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (top <= 1e-12) return true;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1] * (1.0 + 1e-12)) return false;
  return v.back() <= 0.5 * v.front();
}

double window_sup(const KineticWindow& wdw, const std::function<double(double)>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i <= 2048; ++i) m = std::max(m, std::abs(f(wdw.lo + (wdw.hi - wdw.lo) * i / 2048.0)));
  return m;
}

double sigma0(const KineticProblem& p, double xi, bool derivative) {
  if (!p.sigma) return 0.0;
  std::vector<double> v(p.noise_dim);
  (derivative ? p.sigma_derivative : p.sigma)(xi, v);
  return v[0];
}

}  // namespace

KineticReport kinetic_stability_experiment(const ClawFamily& family, const KineticConfig& config,
                                           std::span<const double> lags) {
  if (config.ns.size() < 2) throw ConfigError("kinetic experiment needs at least two n values");
  if (config.ensemble.samples == 0) throw ConfigError("kinetic experiment needs samples >= 1");
  const TorusGrid coarse(config.cells);
  const TorusGrid fine(config.cells * config.refine);
  const TimeGrid coarse_t(config.horizon, config.steps);
  const TimeGrid fine_t(config.horizon, config.steps * config.refine);
  auto limit_fine = family.problem(fine, 0, config.horizon);
  limit_fine.track_measure = false;
  limit_fine.validate();
  std::vector<KineticProblem> problems;
  for (std::size_t n : config.ns) {
    problems.push_back(family.problem(coarse, n, config.horizon));
    problems.back().validate();
  }
  const auto limit = family.problem(coarse, 0, config.horizon);
  const auto phi = family.test(coarse);
  const Primitive b_prim([&](double xi) { return phi.b(xi); }, limit.window.lo, limit.window.hi);
  const std::size_t k = limit.noise_dim;
  const std::size_t ny = config.ys.size();
  const std::size_t nodes = config.steps + 1;
  // Per n: chi gap, mass, min bin, consistency flag, Y * stochastic gap, Y * mass, pairing path.
  const std::size_t per_n = 4 + 2 * ny + nodes;
  const double dt = coarse_t.dt();

  const auto table = parallel::map_replicas(
      config.ensemble.samples, per_n * config.ns.size(), [&](std::size_t r, std::span<double> out) {
        const std::uint64_t seed = config.ensemble.seed;
        const auto wf = sample_wiener(fine_t, k, seed, r);
        const auto ref = solve_claw(limit_fine, wf, seed, r, {config.refine, 0.9}).u.coarsened(config.refine);
        const auto wc = wf.restricted(config.refine);
        const auto bc = sample_wiener(coarse_t, k, seed, r, Channel::auxiliary);
        const double om = omega0(seed, r);
        std::vector<double> ref_pair(nodes);
        for (std::size_t j = 0; j < nodes; ++j) ref_pair[j] = kinetic_pairing(ref, j, phi, b_prim);
        const auto integral = [&](const FieldPath& u, const KineticProblem& pr, const WienerPath& wp) {
          std::vector<double> vals(config.steps * k);
          std::vector<long> revealed(config.steps);
          for (std::size_t j = 0; j < config.steps; ++j) {
            for (std::size_t c = 0; c < k; ++c) vals[j * k + c] = noise_pairing(u.at(j), phi, pr, c);
            revealed[j] = static_cast<long>(j);
          }
          const AdaptedProcess v(coarse_t, ProcessShape::matrix(1, k), std::move(vals), std::move(revealed),
                                 source_wiener | source_auxiliary);
          return ito_integral(v, wp)[0];
        };
        const double i_ref = integral(ref, limit, wc);
        for (std::size_t idx = 0; idx < config.ns.size(); ++idx) {
          const auto& pr = problems[idx];
          const double a = config.coupling.coefficient(config.ns[idx]);
          const auto wn = a == 0.0 ? wc : couple(wc, bc, a);
          const auto sol = solve_claw(pr, wn, seed, r);
          auto row = out.subspan(idx * per_n, per_n);
          double gap = 0.0;
          for (std::size_t j = 0; j < nodes; ++j) {
            const double tw = (j == 0 || j + 1 == nodes) ? 0.5 : 1.0;
            gap += tw * (kinetic_pairing(sol.u, j, phi, b_prim) - ref_pair[j]) * dt;
          }
          row[0] = gap;
          row[1] = sol.m.total_mass();
          row[2] = sol.m.min_bin();
          row[3] = KineticField(sol.u, pr.window, pr.xi_bins).consistent(r == 0 ? 1 : 256) ? 1.0 : 0.0;
          const double d = integral(sol.u, pr, wn) - i_ref;
          for (std::size_t q = 0; q < ny; ++q) {
            const double y = evaluate(config.ys[q], wc, om);
            row[4 + q] = y * d;
            row[4 + ny + q] = y * row[1];
          }
          for (std::size_t j = 0; j < nodes; ++j) row[4 + 2 * ny + j] = noise_pairing(sol.u.at(j), phi, pr, 0);
        }
      });

  KineticReport rep;
  std::vector<double> fdist, sdist, masses, gaps;
  std::vector<PathEnsemble> paths;
  for (std::size_t idx = 0; idx < config.ns.size(); ++idx) {
    const auto& pr = problems[idx];
    const std::size_t base = idx * per_n;
    KineticEntry e;
    e.n = config.ns[idx];
    e.chi_gap = table.mean(base);
    e.mass = table.mean(base + 1);
    const auto mins = table.column(base + 2);
    e.min_bin = *std::min_element(mins.begin(), mins.end());
    const auto flags = table.column(base + 3);
    if (std::find(flags.begin(), flags.end(), 0.0) != flags.end()) rep.chi_consistent = false;
    GapStatistic g;
    g.samples = table.rows();
    for (std::size_t q = 0; q < ny; ++q) {
      const auto est = table.mean(base + 4 + q);
      if (g.witness.empty() || std::abs(est.mean) > g.value) g = {std::abs(est.mean), est.stderr_, table.rows(), to_string(config.ys[q])};
      e.mass_y.push_back(table.mean(base + 4 + ny + q));
    }
    e.stochastic_gap = g;
    e.flux_distance = window_sup(limit.window, [&](double xi) { return pr.flux.df(xi) - limit.flux.df(xi); });
    e.sigma_distance =
        window_sup(limit.window, [&](double xi) { return sigma0(pr, xi, false) - sigma0(limit, xi, false); }) +
        window_sup(limit.window, [&](double xi) { return sigma0(pr, xi, true) - sigma0(limit, xi, true); });
    fdist.push_back(e.flux_distance);
    sdist.push_back(e.sigma_distance);
    masses.push_back(e.mass.mean);
    gaps.push_back(e.stochastic_gap.value);
    if (e.min_bin < 0.0) rep.monitor_failures.push_back("negative kinetic measure bin at n=" + std::to_string(e.n));
    std::vector<double> flat(table.rows() * nodes);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      const auto row = table.row(r);
      std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(base + 4 + 2 * ny), nodes, flat.begin() + static_cast<std::ptrdiff_t>(r * nodes));
    }
    paths.emplace_back(coarse_t, table.rows(), std::move(flat));
    rep.entries.push_back(std::move(e));
  }
  if (!converging(fdist)) rep.monitor_failures.push_back("F_n' does not approach F'");
  if (!converging(sdist)) rep.monitor_failures.push_back("sigma_n does not approach sigma");
  if (*std::max_element(masses.begin(), masses.end()) > config.bounded_factor * masses.front() + 1e-12)
    rep.monitor_failures.push_back("kinetic measure mass grows along the ladder");
  if (!rep.chi_consistent) rep.monitor_failures.push_back("kinetic function invariants violated");
  rep.trend = assess_trend(config.ns, gaps);
  if (!lags.empty()) rep.translation = fit_translation_rate(paths, lags);
  return rep;
}

PathEnsemble claw_pairing_paths(const ClawFamily& family, const KineticConfig& config, std::size_t n) {
  const TorusGrid grid(config.cells);
  const TimeGrid tg(config.horizon, config.steps);
  auto pr = family.problem(grid, n, config.horizon);
  pr.track_measure = false;
  pr.validate();
  const auto phi = family.test(grid);
  const std::size_t k = pr.noise_dim;
  const double a = config.coupling.coefficient(n);
  const auto table = parallel::map_replicas(config.ensemble.samples, tg.steps() + 1, [&](std::size_t r, std::span<double> out) {
    const auto w = sample_wiener(tg, k, config.ensemble.seed, r);
    const auto wn = a == 0.0 ? w : couple(w, sample_wiener(tg, k, config.ensemble.seed, r, Channel::auxiliary), a);
    const auto sol = solve_claw(pr, wn, config.ensemble.seed, r);
    for (std::size_t j = 0; j <= tg.steps(); ++j) out[j] = noise_pairing(sol.u.at(j), phi, pr, 0);
  });
  return {tg, config.ensemble.samples, table.data()};
}

}  // namespace stochlab
