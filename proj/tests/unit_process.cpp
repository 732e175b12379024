#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/process.hpp"
#include "stochlab/rng.hpp"

using namespace stochlab;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

TestFunction sine(const TorusGrid& g) {
  return TestFunction::from_analytic(
      g, [](std::array<double, 2> x) { return std::sin(two_pi * x[0]); },
      [](std::array<double, 2> x) { return std::array<double, 2>{two_pi * std::cos(two_pi * x[0]), 0.0}; },
      [](std::array<double, 2> x) { return -two_pi * two_pi * std::sin(two_pi * x[0]); });
}

}  // namespace

TEST_CASE("pairing a constant field with beta = 1 gives the constant") {
  const TimeGrid tg(1.0, 4);
  const TorusGrid g(32);
  const auto v = AdaptedProcess::deterministic(tg, ProcessShape::field(g.cells(), 1, 1),
                                               [](double, std::span<double> o) { std::fill(o.begin(), o.end(), 2.5); });
  const auto p = pair(TestFunction::constant(g, 1.0), v);
  for (std::size_t j = 0; j < p.nodes(); ++j) CHECK(p.node(j)[0] == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("pairing sin with sin(2 pi x) g(t) gives g/2") {
  const TimeGrid tg(1.0, 8);
  const TorusGrid g(256);
  const auto v = AdaptedProcess::deterministic(tg, ProcessShape::field(g.cells(), 1, 1), [&](double t, std::span<double> o) {
    for (std::size_t i = 0; i < g.cells(); ++i) o[i] = std::sin(two_pi * g.center(i)) * (1.0 + t * t);
  });
  const auto p = pair(sine(g), v);
  for (std::size_t j = 0; j < p.nodes(); ++j) {
    const double t = tg.time(j);
    CHECK(std::abs(p.node(j)[0] - 0.5 * (1.0 + t * t)) <= 1e-10);
  }
}

TEST_CASE("sin is orthogonal to constants") {
  const TimeGrid tg(1.0, 2);
  const TorusGrid g(64);
  const auto v = AdaptedProcess::deterministic(tg, ProcessShape::field(g.cells(), 1, 1),
                                               [](double, std::span<double> o) { std::fill(o.begin(), o.end(), 1.0); });
  CHECK(std::abs(pair(sine(g), v).node(0)[0]) <= 1e-12);
  CHECK_THROWS_AS(pair(sine(TorusGrid(32)), v), GridMismatch);
}

TEST_CASE("pairing keeps the predictability tags") {
  const TimeGrid tg(1.0, 4);
  const TorusGrid g(16);
  const auto v = AdaptedProcess::build(tg, ProcessShape::field(g.cells(), 1, 1), source_wiener,
                                       [](std::size_t, std::span<double> o) { std::fill(o.begin(), o.end(), 1.0); });
  const auto p = pair(TestFunction::constant(g, 1.0), v);
  for (std::size_t j = 0; j < 4; ++j) CHECK(p.revealed(j) == v.revealed(j));
  CHECK(p.predictable());
}

TEST_CASE("a value reading its future is not predictable") {
  const TimeGrid tg(1.0, 4);
  const AdaptedProcess v(tg, ProcessShape::scalar(), {0, 0, 0, 0}, {-1, 0, 3, 3}, source_wiener);
  CHECK_FALSE(v.predictable());
  CHECK(v.first_violation() == 2);
}

TEST_CASE("lp norms") {
  const TimeGrid tg(1.0, 256);
  const auto zero = [&](const ReplicaKey&) { return AdaptedProcess::zero(tg, ProcessShape::scalar()); };
  CHECK(lp_norm(zero, 2.0, 2.0, {1, 10}) == 0.0);
  const auto one = [&](const ReplicaKey&) {
    return AdaptedProcess::deterministic(tg, ProcessShape::scalar(), [](double, std::span<double> o) { o[0] = 1.0; });
  };
  CHECK(lp_norm(one, 3.0, 1.5, {1, 10}) == doctest::Approx(1.0).epsilon(1e-12));
  const auto brownian = [&](const ReplicaKey& k) {
    const auto w = sample_wiener(tg, 1, k.seed, k.replica);
    return AdaptedProcess::build(tg, ProcessShape::scalar(), source_wiener,
                                 [&](std::size_t j, std::span<double> o) { o[0] = w.at(j, 0); });
  };
  // E int_0^1 W^2 dt = 1/2
  CHECK(lp_norm(brownian, 2.0, 2.0, {3, 10000}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
  CHECK_THROWS_AS(lp_norm(one, 2.0, 2.0, {1, 0}), ConfigError);
}

TEST_CASE("weak gap of a mean-zero oscillation is small and of a shift is the shift") {
  const TimeGrid tg(1.0, 64);
  const std::vector<AdaptedProcess> duals{
      AdaptedProcess::deterministic(tg, ProcessShape::scalar(), [](double, std::span<double> o) { o[0] = 1.0; })};
  const auto gen = [&](double shift) {
    return [&tg, shift](const ReplicaKey& k) {
      const double om = omega0(k.seed, k.replica);
      auto vn = AdaptedProcess::build(tg, ProcessShape::scalar(), source_omega0, [&](std::size_t, std::span<double> o) {
        o[0] = std::sin(two_pi * 8.0 * om) + shift;
      });
      auto v = AdaptedProcess::zero(tg, ProcessShape::scalar());
      return ProcessPairSample{vn, v, {1.0}};
    };
  };
  const auto g0 = weak_gap(gen(0.0), duals, {5, 4000});
  CHECK(g0.value <= 3.5 * g0.stderr_);
  const auto g1 = weak_gap(gen(0.25), duals, {5, 4000});
  CHECK(g1.value == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("exponent conjugates") {
  for (double p : {2.5, 3.0, 4.0, 10.0}) {
    const ExponentSet e(p);
    CHECK(std::abs(1.0 / p + 1.0 / e.p_prime() - 1.0) <= 1e-12);
    CHECK(std::abs(2.0 / p + 1.0 / e.p_double_prime() - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(ExponentSet(2.0), ConfigError);
}

TEST_CASE("inconsistent test function derivatives are rejected") {
  const TorusGrid g(32);
  CHECK_THROWS_AS(TestFunction::from_analytic(
                      g, [](std::array<double, 2> x) { return std::sin(two_pi * x[0]); },
                      [](std::array<double, 2> x) { return std::array<double, 2>{std::cos(two_pi * x[0]), 0.0}; },
                      [](std::array<double, 2> x) { return -two_pi * two_pi * std::sin(two_pi * x[0]); }),
                  ConfigError);
}

TEST_CASE("test variables parse and evaluate") {
  for (auto y : default_test_variables()) CHECK(parse_test_variable(to_string(y)) == y);
  CHECK_THROWS_AS(parse_test_variable("w_T_cubed"), ConfigError);
  const auto w = sample_wiener(TimeGrid(1.0, 4), 1, 1, 0);
  CHECK(evaluate(TestVariable::one, w, 0.3) == 1.0);
  CHECK(evaluate(TestVariable::w_terminal, w, 0.3) == w.at(4, 0));
}

TEST_CASE("combine is linear and merges tags") {
  const TimeGrid tg(1.0, 4);
  const auto a = AdaptedProcess::deterministic(tg, ProcessShape::scalar(), [](double t, std::span<double> o) { o[0] = t; });
  const auto b = AdaptedProcess::build(tg, ProcessShape::scalar(), source_wiener,
                                       [](std::size_t j, std::span<double> o) { o[0] = static_cast<double>(j); });
  const auto c = combine(2.0, a, -1.0, b);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(c.node(j)[0] == doctest::Approx(2.0 * tg.time(j) - static_cast<double>(j)));
    CHECK(c.revealed(j) == static_cast<long>(j));
  }
  CHECK_THROWS_AS(combine(1.0, a, 1.0, AdaptedProcess::zero(TimeGrid(1.0, 8), ProcessShape::scalar())), GridMismatch);
}
