#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stochlab/parallel.hpp"
#include "stochlab/rng.hpp"
#include "stochlab/stats.hpp"

using namespace stochlab;

namespace {

void fill(std::size_t r, std::span<double> row) {
  Stream s(42, r, Channel::driving);
  double acc = 0.0;
  for (int i = 0; i < 100; ++i) acc += s.normal();
  row[0] = acc;
  row[1] = std::sin(acc);
}

}  // namespace

TEST_CASE("parallel and serial tables are identical") {
  for (int w : {1, 2, 4}) {
    parallel::set_workers(w);
    const auto a = parallel::map_replicas(1000, 2, fill);
    const auto b = parallel::map_replicas_serial(1000, 2, fill);
    CHECK(a.data() == b.data());
    CHECK(a.mean(0).mean == b.mean(0).mean);
  }
  parallel::set_workers(0);
  CHECK(parallel::workers() >= 1);
}

TEST_CASE("exceptions cross the worker boundary") {
  parallel::set_workers(2);
  CHECK_THROWS_AS(parallel::map_replicas(100, 1,
                                         [](std::size_t r, std::span<double>) {
                                           if (r == 57) throw std::runtime_error("boom");
                                         }),
                  std::runtime_error);
  parallel::set_workers(0);
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  const auto e = estimate_mean(std::vector<double>{1.0, 3.0});
  CHECK(e.mean == 2.0);
  CHECK(e.stderr_ == doctest::Approx(1.0));
}

TEST_CASE("streams are independent of construction order") {
  Stream a(1, 5, Channel::driving);
  Stream b(1, 5, Channel::driving);
  Stream c(1, 5, Channel::auxiliary);
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
}
