// Serial reference vs OpenMP replica loop on two representative kernels.

#include <benchmark/benchmark.h>

#include "stochlab/ito.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/process.hpp"
#include "stochlab/transport.hpp"
#include "stochlab/wiener.hpp"

using namespace stochlab;

namespace {

// int W dW on 512 steps, one replica per row
void ito_row(std::size_t r, std::span<double> row) {
  const TimeGrid g(1.0, 512);
  const auto w = sample_wiener(g, 1, 3, r);
  const auto v = AdaptedProcess::build(g, ProcessShape::scalar(), source_wiener,
                                       [&](std::size_t j, std::span<double> o) { o[0] = w.at(j, 0); });
  row[0] = ito_integral(v, w)[0];
}

// one coarse stochastic transport solve per row
void transport_row(std::size_t r, std::span<double> row) {
  static const TransportFamily fam;
  static const auto problem = fam.problem(TorusGrid(64), 8);
  const TimeGrid g(0.1, 256);
  const auto w = sample_wiener(g, problem.noise.dim, 5, r);
  const auto u = solve_transport(problem, w, 5, r);
  row[0] = u.mass(g.steps());
}

template <void (*Row)(std::size_t, std::span<double>)>
void serial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::map_replicas_serial(n, 1, Row).data().data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <void (*Row)(std::size_t, std::span<double>)>
void openmp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  parallel::set_workers(0);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::map_replicas(n, 1, Row).data().data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["workers"] = parallel::workers();
}

}  // namespace

BENCHMARK(serial<ito_row>)->Name("ito/serial")->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(openmp<ito_row>)->Name("ito/openmp")->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(serial<transport_row>)->Name("transport/serial")->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(openmp<transport_row>)->Name("transport/openmp")->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
