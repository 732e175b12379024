#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "stochlab/error.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/wiener.hpp"

using namespace stochlab;

namespace {

double sup_abs(const WienerPath& w) {
  double m = 0.0;
  for (std::size_t j = 0; j <= w.grid().steps(); ++j) m = std::max(m, std::abs(w.at(j, 0)));
  return m;
}

}  // namespace

TEST_CASE("time grid nodes") {
  const TimeGrid g(2.0, 8);
  CHECK(g.time(0) == 0.0);
  CHECK(g.time(8) == 2.0);
  CHECK(g.dt() == doctest::Approx(0.25));
  for (std::size_t j = 1; j <= 8; ++j) CHECK(g.time(j) > g.time(j - 1));
  CHECK_THROWS_AS(TimeGrid(1.0, 0), ConfigError);
  CHECK_THROWS_AS(TimeGrid(-1.0, 4), ConfigError);
}

TEST_CASE("sample_wiener starts at zero and regenerates bit for bit") {
  const TimeGrid g(1.0, 1);
  const auto w = sample_wiener(g, 1, 3, 0);
  CHECK(w.at(0, 0) == 0.0);

  const TimeGrid g2(1.0, 64);
  const auto a = sample_wiener(g2, 3, 42, 17);
  const auto b = sample_wiener(g2, 3, 42, 17);
  REQUIRE(a.values().size() == b.values().size());
  CHECK(std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)) == 0);
  CHECK_THROWS_AS(sample_wiener(g2, 0, 1, 0), ConfigError);
}

TEST_CASE("a path that does not start at zero is rejected") {
  const TimeGrid g(1.0, 2);
  CHECK_THROWS_AS(WienerPath(g, 1, {0.5, 1.0, 1.5}), ConfigError);
}

TEST_CASE("terminal variance is T over many replicas") {
  const TimeGrid g(1.0, 16);
  const auto t = parallel::map_replicas(10000, 1, [&](std::size_t r, std::span<double> out) {
    const double x = sample_wiener(g, 1, 5, r).at(16, 0);
    out[0] = x * x;
  });
  CHECK(t.mean(0).mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("increments have no lag-one correlation") {
  const TimeGrid g(1.0, 8);
  const auto t = parallel::map_replicas(10000, 3, [&](std::size_t r, std::span<double> out) {
    const auto w = sample_wiener(g, 1, 9, r);
    const double a = w.increment(3, 0) / std::sqrt(g.dt());
    const double b = w.increment(4, 0) / std::sqrt(g.dt());
    out[0] = a * b;
    out[1] = a * a;
    out[2] = b * b;
  });
  const double corr = t.mean(0).mean / std::sqrt(t.mean(1).mean * t.mean(2).mean);
  CHECK(std::abs(corr) <= 0.03);
}

TEST_CASE("coupling with a = 0 is the identity") {
  const TimeGrid g(1.0, 32);
  const auto w = sample_wiener(g, 2, 1, 0);
  const auto b = sample_wiener(g, 2, 1, 0, Channel::auxiliary);
  const auto c = couple(w, b, 0.0);
  CHECK(sup_distance(c, w) == 0.0);
}

TEST_CASE("coupled paths keep unit variance") {
  const TimeGrid g(1.0, 16);
  for (double a : {1.0, 0.5, 0.25, 1.0 / 16.0}) {
    const auto t = parallel::map_replicas(10000, 1, [&](std::size_t r, std::span<double> out) {
      const auto w = sample_wiener(g, 1, 11, r);
      const auto b = sample_wiener(g, 1, 11, r, Channel::auxiliary);
      const double x = couple(w, b, a).at(16, 0);
      out[0] = x * x;
    });
    CHECK(t.mean(0).mean == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("pathwise coupling bound") {
  const TimeGrid g(1.0, 256);
  const auto w = sample_wiener(g, 1, 2, 0);
  const auto b = sample_wiener(g, 1, 2, 0, Channel::auxiliary);
  std::vector<double> d;
  for (double a : {1.0, 0.25, 1.0 / 16.0}) {
    d.push_back(sup_distance(couple(w, b, a), w));
    const double s = std::sqrt(1.0 + a * a);
    CHECK(d.back() <= std::abs(1.0 - 1.0 / s) * sup_abs(w) + a / s * sup_abs(b) + 1e-12);
  }
  CHECK(d[1] < d[0]);
  CHECK(d[2] < d[1]);
  CHECK(d[2] < 0.2 * (sup_abs(w) + sup_abs(b)));
}

TEST_CASE("mean squared sup distance decreases along a_n = 1/n") {
  const TimeGrid g(1.0, 128);
  const CouplingSchedule sched;
  std::vector<double> m;
  for (std::size_t n : {1, 2, 4, 8, 16}) {
    const auto t = parallel::map_replicas(1000, 1, [&](std::size_t r, std::span<double> out) {
      const auto w = sample_wiener(g, 1, 4, r);
      const auto b = sample_wiener(g, 1, 4, r, Channel::auxiliary);
      const double d = sup_distance(couple(w, b, sched.coefficient(n)), w);
      out[0] = d * d;
    });
    m.push_back(t.mean(0).mean);
  }
  for (std::size_t i = 1; i < m.size(); ++i) CHECK(m[i] <= m[i - 1]);
  // O(1/n^2): the last step of the ladder shrinks by about four
  CHECK(m.back() < 0.35 * m[m.size() - 2]);
}

TEST_CASE("mismatched paths are rejected") {
  const auto w = sample_wiener(TimeGrid(1.0, 8), 1, 1, 0);
  const auto v = sample_wiener(TimeGrid(1.0, 16), 1, 1, 0);
  const auto u = sample_wiener(TimeGrid(1.0, 8), 2, 1, 0);
  CHECK_THROWS_AS(couple(w, v, 1.0), GridMismatch);
  CHECK_THROWS_AS(couple(w, u, 1.0), GridMismatch);
  CHECK_THROWS_AS(sup_distance(w, v), GridMismatch);
}

TEST_CASE("restriction keeps the coarse nodes") {
  const TimeGrid g(1.0, 16);
  const auto w = sample_wiener(g, 1, 8, 3);
  const auto c = w.restricted(4);
  CHECK(c.grid().steps() == 4);
  for (std::size_t j = 0; j <= 4; ++j) CHECK(c.at(j, 0) == w.at(4 * j, 0));
  CHECK_THROWS(w.restricted(3));
}
