#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stochlab/error.hpp"
#include "stochlab/translation.hpp"
#include "stochlab/wiener.hpp"

using namespace stochlab;

namespace {

PathEnsemble brownian(const TimeGrid& g, std::size_t paths, std::uint64_t seed) {
  PathEnsemble e(g, paths);
  for (std::size_t p = 0; p < paths; ++p) {
    const auto w = sample_wiener(g, 1, seed, p);
    auto out = e.path(p);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = w.at(j, 0);
  }
  return e;
}

PathEnsemble deterministic(const TimeGrid& g, double (*f)(double)) {
  PathEnsemble e(g, 1);
  auto out = e.path(0);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = f(g.time(j));
  return e;
}

const std::vector<double> ladder{1.0 / 256, 1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};

}  // namespace

TEST_CASE("modulus of a linear path is exact") {
  const TimeGrid g(1.0, 1024);
  const auto e = deterministic(g, [](double t) { return t; });
  for (double h : ladder) {
    const auto m = translation_modulus(e, h);
    CHECK(!m.snapped);
    CHECK(m.value == doctest::Approx(h * (1.0 - h)).epsilon(1e-12));
  }
  const auto fit = fit_translation_rate(std::span(&e, 1), ladder);
  CHECK(fit.slope[0] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("constant paths are exact and skip the fit") {
  const TimeGrid g(1.0, 512);
  const auto e = deterministic(g, [](double) { return 3.0; });
  const auto fit = fit_translation_rate(std::span(&e, 1), ladder);
  CHECK(fit.exact[0]);
  CHECK(std::isnan(fit.slope[0]));
  CHECK(fit.uniformity() == 1.0);
  CHECK(std::isinf(fit.min_slope()));
}

TEST_CASE("brownian modulus matches sqrt(2h/pi)(T - h)") {
  const TimeGrid g(1.0, 1024);
  const auto e = brownian(g, 4000, 11);
  for (double h : {1.0 / 64, 1.0 / 8}) {
    const auto m = translation_modulus(e, h);
    const double exact = std::sqrt(2.0 * h / std::numbers::pi) * (1.0 - h);
    CHECK(std::abs(m.value - exact) <= 4.0 * m.stderr_);
  }
  const auto fit = fit_translation_rate(std::span(&e, 1), ladder);
  CHECK(fit.slope[0] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("uniformity across families") {
  const TimeGrid g(1.0, 1024);
  std::vector<PathEnsemble> fam{deterministic(g, [](double t) { return t; }),
                                deterministic(g, [](double t) { return 2.0 * t; })};
  const auto fit = fit_translation_rate(fam, ladder);
  CHECK(fit.uniformity() == doctest::Approx(2.0));
  CHECK(fit.min_slope() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("off-grid lags snap down and are flagged") {
  const TimeGrid g(1.0, 100);
  const auto e = deterministic(g, [](double t) { return t; });
  const auto m = translation_modulus(e, 0.025);
  CHECK(m.snapped);
  CHECK(m.shift == 2);
  CHECK(m.lag == doctest::Approx(0.02));
  CHECK_THROWS_AS(translation_modulus(e, 0.005), ConfigError);
  CHECK_THROWS_AS(translation_modulus(e, 1.0), ConfigError);
}

TEST_CASE("fit rejects short ladders") {
  const TimeGrid g(1.0, 1024);
  const auto e = deterministic(g, [](double t) { return t; });
  const std::vector<double> three{1.0 / 64, 1.0 / 32, 1.0 / 16};
  const std::vector<double> narrow{1.0 / 64, 1.0 / 48, 1.0 / 32, 1.0 / 16};
  CHECK_THROWS_AS(fit_translation_rate(std::span(&e, 1), three), ConfigError);
  CHECK_THROWS_AS(fit_translation_rate(std::span(&e, 1), narrow), ConfigError);
}
