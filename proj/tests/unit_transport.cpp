#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/transport.hpp"

using namespace stochlab;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

TransportProblem shift_problem(std::size_t cells) {
  TransportProblem p;
  p.grid = TorusGrid(cells);
  p.velocity = [](double, Point) { return Point{1.0, 0.0}; };
  p.divergence = [](double, Point) { return 0.0; };
  p.initial = [](Point x, double) { return std::sin(two_pi * x[0]); };
  return p;
}

TestFunction cosine(const TorusGrid& g) {
  return TestFunction::from_analytic(
      g, [](Point x) { return std::cos(two_pi * x[0]); },
      [](Point x) { return Point{-two_pi * std::sin(two_pi * x[0]), 0.0}; },
      [](Point x) { return -two_pi * two_pi * std::cos(two_pi * x[0]); });
}

}  // namespace

TEST_CASE("upwind at unit CFL is an exact shift") {
  auto p = shift_problem(64);
  const TimeGrid t(0.25, 16);
  CHECK(cfl_number(p, t) == doctest::Approx(1.0));
  const auto w = sample_wiener(t, 1, 1, 0);
  CHECK_THROWS_AS(solve_transport(p, w, 1, 0), CflError);
  const auto u = solve_transport(p, w, 1, 0, SolveOptions{1, 1.0});
  const auto last = u.at(t.steps());
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(last[i] == doctest::Approx(std::sin(two_pi * (p.grid.center(i) - 0.25))).epsilon(1e-12));
}

TEST_CASE("inconsistent divergence is rejected") {
  auto p = shift_problem(32);
  p.velocity = [](double, Point x) { return Point{std::sin(two_pi * x[0]), 0.0}; };
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.divergence = [](double, Point x) { return two_pi * std::cos(two_pi * x[0]); };
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("mass and energy bookkeeping") {
  const TransportFamily fam;
  auto p = fam.problem(TorusGrid(64), 4);
  p.noise = Noise::none();
  p.source = {};
  const TimeGrid t(0.1, 256);
  const auto u = solve_transport(p, sample_wiener(t, 1, 2, 0), 2, 0);
  CHECK(std::abs(u.mass(t.steps()) - u.mass(0)) <= 1e-12);
  CHECK(u.energy_drift() <= 1e-12);
  const auto c = u.coarsened(4);
  CHECK(c.grid().cells() == 16);
  CHECK(std::abs(c.mass(t.steps()) - u.mass(t.steps())) <= 1e-12);
  const auto one = TestFunction::constant(u.grid(), 1.0);
  const auto m = renormalized_pairing(u, one, [](double v) { return v; });
  CHECK(m[7] == doctest::Approx(u.mass(7)).epsilon(1e-12));
}

TEST_CASE("weak form with a constant test function is exact") {
  const TransportFamily fam;
  const auto p = fam.problem(TorusGrid(64), 2);
  const TimeGrid t(0.1, 512);
  const auto w = sample_wiener(t, 2, 3, 0);
  const auto u = solve_transport(p, w, 3, 0);
  const auto one = TestFunction::constant(u.grid(), 1.0);
  CHECK(std::abs(weak_residual(u, p, w, one, t.steps())) <= 1e-12);
}

TEST_CASE("weak residual shrinks under refinement") {
  const TransportFamily fam;
  double prev = INFINITY;
  for (std::size_t cells : {32, 64, 128}) {
    const auto p = fam.problem(TorusGrid(cells), 0);
    const TimeGrid t(0.1, 16 * cells);
    const auto w = sample_wiener(t, 2, 4, 0);
    const auto u = solve_transport(p, w, 4, 0);
    const double r = std::abs(weak_residual(u, p, w, cosine(u.grid()), t.steps()));
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev <= 1e-2);
}

TEST_CASE("variance inequality for a Lipschitz map") {
  std::vector<double> u;
  for (int i = 0; i < 2000; ++i) u.push_back(std::sin(0.37 * i) * 2.0);
  const auto v = variance_inequality(u, [](double x) { return std::sin(x); }, 1.0);
  CHECK(v.variance <= v.about_mean + 1e-12);
  CHECK(v.about_mean <= v.lipschitz_bound + 1e-12);
}

TEST_CASE("small stability experiment") {
  TransportFamily fam;
  StabilityConfig cfg;
  cfg.cells = 32;
  cfg.steps = 256;
  cfg.ns = {2, 8};
  cfg.refine = 2;
  cfg.ensemble = {7, 20};
  const auto rep = stability_experiment(fam, cfg);
  CHECK(rep.monitors_ok());
  CHECK(rep.mass_drift <= 1e-12);
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) {
    CHECK(e.energy_sup.mean <= e.gronwall);
    CHECK(e.sign_preserved);
  }
  CHECK(rep.entries[1].lp_distance < rep.entries[0].lp_distance);
  CHECK(rep.entries[1].initial_distance < rep.entries[0].initial_distance);
}
