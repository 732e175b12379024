#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <optional>

#include "stochlab/config.hpp"
#include "stochlab/error.hpp"
#include "stochlab/experiments.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/report.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"stochlab: stochastic integrals under converging Wiener drivers"};
  app.require_subcommand(1);
  std::string config;
  std::string out;
  int workers = 0;
  std::optional<std::uint64_t> seed_override;

  for (const auto& name : stochlab::subcommands()) {
    auto* sub = app.add_subcommand(name, name == "all" ? "run every configured experiment" : "run [" + name + "] sections");
    sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory for the CSV report")->required();
    sub->add_option("--workers", workers, "worker cap (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed-override", seed_override, "replace the seed of every section");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; any other usage error counts as a config error
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string kind = app.get_subcommands().front()->get_name();

  try {
    stochlab::parallel::set_workers(workers);
    const auto plan = stochlab::load_config(config);
    const auto rows = stochlab::run_subcommand(plan, kind, seed_override);
    fs::create_directories(out);
    const auto path = fs::path(out) / (kind + ".csv");
    std::ofstream file(path, std::ios::binary);
    if (!file) throw stochlab::ConfigError("cannot write " + path.string());
    stochlab::write_csv(file, rows);
    file.close();

    const auto bad = stochlab::failures(rows);
    fmt::print("{}: {} rows -> {}\n", kind, rows.size(), path.string());
    if (bad.empty()) return 0;
    fmt::print(stderr, "{} failing rows:\n", bad.size());
    for (const auto& r : bad) fmt::print(stderr, "  {}\n", stochlab::to_csv(r));
    return 1;
  } catch (const stochlab::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  }
}
