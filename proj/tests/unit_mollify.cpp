#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stochlab/error.hpp"
#include "stochlab/mollify.hpp"
#include "stochlab/rng.hpp"

using namespace stochlab;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

GridFunction random_smooth(const TimeGrid& g, std::uint64_t r) {
  Stream st(99, r, Channel::pairs);
  const double c = st.normal();
  double a[4], ph[4];
  for (int k = 0; k < 4; ++k) {
    a[k] = st.normal();
    ph[k] = two_pi * st.uniform();
  }
  return GridFunction::sample(g, [&](double t) {
    double v = c;
    for (int k = 0; k < 4; ++k) v += a[k] * std::sin(two_pi * (k + 1) * t + ph[k]) / (k + 1);
    return v;
  });
}

GridFunction minus(const GridFunction& f, const GridFunction& g) {
  auto v = f.values;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= g.values[i];
  return {f.grid, v};
}

}  // namespace

TEST_CASE("kernel invariants") {
  for (double u : {0.0, 1.0, -0.5, 1.5}) CHECK(MollifierKernel::base(u) == 0.0);
  double s = 0.0;
  constexpr int n = 100000;
  for (int i = 0; i <= n; ++i) {
    const double b = MollifierKernel::base(static_cast<double>(i) / n);
    CHECK(b >= 0.0);
    s += b;
  }
  CHECK(std::abs(s / n - 1.0) <= 1e-8);
  const MollifierKernel k(0.2);
  CHECK(k.mass(1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(MollifierKernel(0.0), ConfigError);
}

TEST_CASE("mass over [0, delta] tends to one as rho shrinks") {
  const double delta = 0.05;
  double prev = 1.0;
  for (double rho : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const double miss = std::abs(1.0 - MollifierKernel(rho).mass(delta));
    CHECK(miss <= prev + 1e-12);
    prev = miss;
    if (rho <= delta) CHECK(miss <= 1e-6);
  }
}

TEST_CASE("mollify of constants") {
  const TimeGrid g(1.0, 4096);
  const MollifierKernel k(0.1);
  const auto one = GridFunction::sample(g, [](double) { return 1.0; });
  const auto r = mollify(k, one);
  CHECK(r.values[0] == 0.0);
  for (std::size_t j = 0; j <= g.steps(); ++j)
    if (g.time(j) >= 0.1) CHECK(std::abs(r.values[j] - 1.0) <= 1e-6);
  const auto a = adjoint_mollify(k, one);
  for (std::size_t j = 0; j <= g.steps(); ++j)
    if (g.time(j) <= 0.9) CHECK(std::abs(a.values[j] - 1.0) <= 1e-6);
}

TEST_CASE("narrow kernels are rejected") {
  const TimeGrid g(1.0, 64);
  const auto f = GridFunction::sample(g, [](double t) { return t; });
  CHECK_THROWS_AS(mollify(MollifierKernel(3.0 / 64.0), f), ConfigError);
  CHECK_NOTHROW(mollify(MollifierKernel(4.0 / 64.0), f));
}

TEST_CASE("approximation of sin improves as rho shrinks") {
  const TimeGrid g(1.0, 8192);
  const auto f = GridFunction::sample(g, [](double t) { return std::sin(two_pi * t); });
  double prev = INFINITY;
  for (double rho : {0.1, 0.05, 0.025}) {
    const double e = lr_norm(minus(f, mollify(MollifierKernel(rho), f)), 2.0);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("adjoint and derivative adjoint identities") {
  const TimeGrid g(1.0, 1024);
  for (double rho : {0.2, 0.05}) {
    const MollifierKernel k(rho);
    for (std::uint64_t r = 0; r < 20; ++r) {
      const auto f = random_smooth(g, 2 * r);
      const auto h = random_smooth(g, 2 * r + 1);
      CHECK(std::abs(inner(mollify(k, f), h) - inner(f, adjoint_mollify(k, h))) <= 1e-10);
      CHECK(std::abs(inner(mollify_derivative(k, f), h) + inner(f, adjoint_mollify_derivative(k, h))) <= 1e-8);
    }
  }
}

TEST_CASE("the adjoint identity is a direct double sum") {
  const TimeGrid g(1.0, 128);
  const MollifierKernel k(0.125);
  const auto f = random_smooth(g, 7);
  const auto h = random_smooth(g, 8);
  // sum_i sum_{j<i} tau_i tau_j K(t_i - t_j) f_j g_i with trapezoid weights tau
  const double dt = g.dt();
  const auto tau = [&](std::size_t i) { return (i == 0 || i == g.steps() ? 0.5 : 1.0) * dt; };
  double direct = 0.0;
  for (std::size_t i = 0; i <= g.steps(); ++i)
    for (std::size_t j = 0; j < i; ++j) direct += tau(i) * tau(j) * k(g.time(i) - g.time(j)) * f.values[j] * h.values[i];
  CHECK(std::abs(inner(mollify(k, f), h) - direct) <= 1e-12);
}

TEST_CASE("derivative of the mollified constant is the kernel") {
  const TimeGrid g(1.0, 1 << 15);
  const MollifierKernel k(0.25);
  const auto d = mollify_derivative(k, GridFunction::sample(g, [](double) { return 1.0; }));
  double worst = 0.0;
  for (std::size_t j = 0; j <= g.steps(); ++j) worst = std::max(worst, std::abs(d.values[j] - k(g.time(j))));
  CHECK(worst <= 1e-6);
  const auto z = mollify_derivative(k, GridFunction::sample(g, [](double) { return 0.0; }));
  CHECK(*std::max_element(z.values.begin(), z.values.end()) == 0.0);
}

TEST_CASE("support of the adjoint") {
  const TimeGrid g(1.0, 1000);
  const MollifierKernel k(0.1);
  const auto h = GridFunction::sample(g, [](double t) { return t >= 0.8 ? 1.0 : 0.0; });
  const auto a = adjoint_mollify(k, h);
  for (std::size_t j = 0; j <= g.steps(); ++j)
    if (g.time(j) < 0.7 - 1e-12) CHECK(a.values[j] == 0.0);
}

TEST_CASE("contraction and smoothing bounds") {
  const TimeGrid g(1.0, 2048);
  for (double rho : {0.2, 0.05}) {
    const MollifierKernel k(rho);
    const double c = k.derivative_l1();
    for (std::uint64_t r = 0; r < 10; ++r) {
      const auto f = random_smooth(g, r);
      const auto rf = mollify(k, f);
      for (double p : {1.0, 2.0, 3.0}) CHECK(lr_norm(rf, p) <= lr_norm(f, p) * (1.0 + 1e-6));
      CHECK(lr_norm(mollify_derivative(k, f), 2.0) <= c * lr_norm(f, 2.0) * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("causality is bit exact") {
  const TimeGrid g(1.0, 512);
  const MollifierKernel k(0.1);
  const auto f = random_smooth(g, 3);
  auto f2 = f;
  for (std::size_t j = 300; j <= g.steps(); ++j) f2.values[j] += 5.0;
  const auto a = mollify(k, f);
  const auto b = mollify(k, f2);
  for (std::size_t j = 0; j <= 300; ++j) CHECK(a.values[j] == b.values[j]);
}

TEST_CASE("mollified processes stay predictable") {
  const TimeGrid g(1.0, 64);
  const auto w = sample_wiener(g, 1, 1, 0);
  const auto v = AdaptedProcess::build(g, ProcessShape::scalar(), source_wiener,
                                       [&](std::size_t j, std::span<double> o) { o[0] = w.at(j, 0); });
  const auto m = mollify(MollifierKernel(0.125), v);
  CHECK(m.predictable());
  for (std::size_t j = 1; j < m.nodes(); ++j) CHECK(m.revealed(j) <= static_cast<long>(j) - 1);
}
