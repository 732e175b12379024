#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/ito.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/rng.hpp"

using namespace stochlab;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

AdaptedProcess brownian(const WienerPath& w) {
  return AdaptedProcess::build(w.grid(), ProcessShape::scalar(), source_wiener,
                               [&](std::size_t j, std::span<double> o) { o[0] = w.at(j, 0); });
}

AdaptedProcess constant(const TimeGrid& g, double c) {
  return AdaptedProcess::deterministic(g, ProcessShape::scalar(), [c](double, std::span<double> o) { o[0] = c; });
}

}  // namespace

TEST_CASE("trivial integrands") {
  const TimeGrid g(1.0, 100);
  const auto w = sample_wiener(g, 1, 1, 0);
  CHECK(ito_integral(AdaptedProcess::zero(g, ProcessShape::scalar()), w)[0] == 0.0);
  const auto path = ito_path(constant(g, 1.0), w);
  for (std::size_t j = 0; j <= 100; ++j) CHECK(std::abs(path[j] - w.at(j, 0)) <= 1e-13);
}

TEST_CASE("W dW matches the algebraic identity node by node") {
  const TimeGrid g(1.0, 256);
  for (std::size_t r = 0; r < 20; ++r) {
    const auto w = sample_wiener(g, 1, 2, r);
    const auto path = ito_path(brownian(w), w);
    double qv = 0.0;
    for (std::size_t j = 0; j <= g.steps(); ++j) {
      const double x = w.at(j, 0);
      CHECK(std::abs(path[j] - 0.5 * (x * x - qv)) <= 1e-12 * (1.0 + x * x + qv));
      if (j < g.steps()) qv += w.increment(j, 0) * w.increment(j, 0);
    }
  }
}

TEST_CASE("matrix integrand against a two dimensional path") {
  const TimeGrid g(1.0, 16);
  const auto w = sample_wiener(g, 2, 3, 0);
  // rows (1, 0) and (1, 1)
  const auto v = AdaptedProcess::deterministic(g, ProcessShape::matrix(2, 2), [](double, std::span<double> o) {
    o[0] = 1.0;
    o[1] = 0.0;
    o[2] = 1.0;
    o[3] = 1.0;
  });
  const auto i = ito_integral(v, w);
  CHECK(i[0] == doctest::Approx(w.at(16, 0)));
  CHECK(i[1] == doctest::Approx(w.at(16, 0) + w.at(16, 1)));
}

TEST_CASE("anticipating integrands are a hard error") {
  const TimeGrid g(1.0, 4);
  const auto w = sample_wiener(g, 1, 1, 0);
  const AdaptedProcess v(g, ProcessShape::scalar(), {1, 1, 1, 1}, {-1, 0, 2, 4}, source_wiener);
  CHECK_THROWS_AS(ito_integral(v, w), PredictabilityError);
  // up to the violation the sum is still defined
  CHECK_NOTHROW(ito_integral(v, w, 3));
  CHECK_THROWS_AS(ito_integral(constant(TimeGrid(1.0, 8), 1.0), w), GridMismatch);
}

TEST_CASE("bilinearity") {
  const TimeGrid g(1.0, 64);
  const auto w = sample_wiener(g, 1, 4, 0);
  const auto a = brownian(w);
  const auto b = AdaptedProcess::deterministic(g, ProcessShape::scalar(), [](double t, std::span<double> o) { o[0] = std::exp(t); });
  const double lhs = ito_integral(combine(2.0, a, -3.0, b), w)[0];
  const double rhs = 2.0 * ito_integral(a, w)[0] - 3.0 * ito_integral(b, w)[0];
  CHECK(std::abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("isometry: V = t and V = 1") {
  const TimeGrid g(1.0, 200);
  const auto ramp = AdaptedProcess::deterministic(g, ProcessShape::scalar(), [](double t, std::span<double> o) { o[0] = t; });
  const auto r = isometry_residual([&](std::size_t k) { return IsometrySample{ramp, sample_wiener(g, 1, 6, k)}; }, 100000);
  CHECK(r.rhs == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(r.lhs == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  CHECK(std::abs(r.z) <= 3.0);
  const auto one = constant(g, 1.0);
  const auto s = isometry_residual([&](std::size_t k) { return IsometrySample{one, sample_wiener(g, 1, 7, k)}; }, 20000);
  CHECK(s.rhs == doctest::Approx(1.0));
  CHECK(s.lhs == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("isometry: the oscillating counterexample integrand gives 1/4") {
  const TimeGrid g(1.0, 256);
  const auto r = isometry_residual(
      [&](std::size_t k) {
        const double s = std::sin(two_pi * 4.0 * omega0(8, k));
        auto v = AdaptedProcess::build(g, ProcessShape::scalar(), source_omega0, [&](std::size_t j, std::span<double> o) {
          o[0] = s * std::sin(two_pi * 4.0 * g.time(j));
        });
        return IsometrySample{v, sample_wiener(g, 1, 8, k)};
      },
      50000);
  CHECK(r.lhs == doctest::Approx(0.25).epsilon(0.04));
  CHECK(r.rhs == doctest::Approx(0.25).epsilon(0.04));
  CHECK(std::abs(r.z) <= 3.0);
}

TEST_CASE("isometry needs at least 100 samples") {
  const TimeGrid g(1.0, 4);
  CHECK_THROWS_AS(isometry_residual([&](std::size_t k) { return IsometrySample{constant(g, 1.0), sample_wiener(g, 1, 1, k)}; }, 99),
                  ConfigError);
}

TEST_CASE("martingale mean of bounded integrands") {
  const TimeGrid g(1.0, 128);
  const auto t = parallel::map_replicas(20000, 1, [&](std::size_t r, std::span<double> out) {
    const auto w = sample_wiener(g, 1, 10, r);
    const auto v = AdaptedProcess::build(g, ProcessShape::scalar(), source_wiener,
                                         [&](std::size_t j, std::span<double> o) { o[0] = std::cos(w.at(j, 0)); });
    out[0] = ito_integral(v, w)[0];
  });
  const auto m = t.mean(0);
  CHECK(std::abs(m.mean) <= 3.0 * m.stderr_);
}
