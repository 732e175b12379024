#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "stochlab/config.hpp"
#include "stochlab/error.hpp"
#include "stochlab/experiments.hpp"
#include "stochlab/report.hpp"

using namespace stochlab;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("minimal config") {
  const auto plan = parse_config("# comment\n[isometry]\nseed = 3\nsamples = 10 ; trailing\n");
  REQUIRE(plan.sections.size() == 1);
  const auto& s = plan.sections[0];
  CHECK(s.kind == "isometry");
  CHECK(s.seed() == 3);
  CHECK(s.count("samples") == 10);
  CHECK(s.count("steps") == 512);
  CHECK(plan.of_kind("isometry").size() == 1);
  CHECK(plan.of_kind("claw").empty());
}

TEST_CASE("labelled sections and fraction lists") {
  const auto plan = parse_config(
      "[translate:a]\nseed = 1\nsamples = 4\nh_ladder = 1/256, 1/128, 1/64, 1/32\n"
      "[translate:b]\nseed = 2\nsamples = 4\nwhich = claw\n");
  REQUIRE(plan.sections.size() == 2);
  CHECK(plan.sections[0].name() == "translate:a");
  const auto h = plan.sections[0].numbers("h_ladder");
  REQUIRE(h.size() == 4);
  CHECK(h[0] == 1.0 / 256);
  CHECK(h[3] == 1.0 / 32);
  CHECK(plan.sections[1].words("which") == std::vector<std::string>{"claw"});
  CHECK(parse_number("3/4") == 0.75);
  CHECK(parse_number("1e-3") == 0.001);
  CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
}

TEST_CASE("validation errors name the problem") {
  CHECK(contains(error_of("[isometry]\nseed = 1\nsamples = 1\nsteps = 4\nsteps = 8\n"), "duplicate key 'steps'"));
  CHECK(contains(error_of("[isometry]\nseed = 1\nsamples = 1\n[isometry]\nseed = 2\nsamples = 1\n"),
                 "duplicate section"));
  const auto unknown = error_of("[isometry]\nseed = 1\nsamples = 1\nstepz = 4\n");
  CHECK(contains(unknown, "'stepz'"));
  CHECK(contains(unknown, "identity_paths"));
  CHECK(contains(error_of("[nonsense]\nseed = 1\n"), "accepted: "));
  CHECK(contains(error_of("[isometry]\nseed = 1\n"), "suggested default: samples = 100000"));
  const auto neg = error_of("[isometry]\nseed = 1\nsamples = -5\n");
  CHECK(contains(neg, "samples"));
  CHECK(contains(neg, "positive"));
  CHECK(contains(error_of("seed = 1\n"), "outside of any section"));
  CHECK(contains(error_of("[isometry\n"), "unterminated"));
  CHECK(contains(error_of("[isometry]\nseed\n"), "key = value"));
}

TEST_CASE("every kind has a schema and seed/samples are implicit") {
  for (const auto& k : experiment_kinds()) {
    CHECK(!accepted_keys(k).empty());
    CHECK(parse_config("[" + k + "]\nseed = 1\nsamples = 2\n").sections.size() == 1);
  }
  CHECK_THROWS_AS(accepted_keys("nope"), ConfigError);
}

TEST_CASE("csv rows") {
  ReportRow r;
  r.experiment = "x";
  r.n = 4;
  r.statistic = "s";
  r.value = 0.25;
  r.stderr_ = 0.001;
  r.samples = 10;
  r.seed = 7;
  r.verdict = Verdict::pass;
  CHECK(to_csv(r) == "x,4,,,s,0.25,0.001,10,7,pass");
  std::ostringstream out;
  write_csv(out, {r});
  CHECK(out.str() == std::string(csv_header) + "\nx,4,,,s,0.25,0.001,10,7,pass\n");
  auto bad = r;
  bad.verdict = Verdict::invalid;
  CHECK(failures({r, bad}).size() == 1);
}

TEST_CASE("empty plan gives no rows") {
  const auto plan = parse_config("# nothing here\n");
  CHECK(run_subcommand(plan, "all", {}).empty());
  CHECK(run_subcommand(plan, "isometry", {}).empty());
}

TEST_CASE("seed override replaces the section seed") {
  const auto plan = parse_config("[isometry]\nseed = 1\nsamples = 200\nsteps = 16\nidentity_paths = 5\n");
  const auto rows = run_section(plan.sections[0], 99);
  REQUIRE(!rows.empty());
  for (const auto& r : rows) CHECK(r.seed == 99);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = fs::temp_directory_path() / "stochlab_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const auto run = [&](const std::string& args) {
    const int status = std::system((std::string(STOCHLAB_BINARY) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const auto empty = write("empty.ini", "# no sections\n");
  CHECK(run("isometry --config " + empty + " --out " + (dir / "out").string()) == 0);
  std::ifstream csv(dir / "out" / "isometry.csv");
  std::string all((std::istreambuf_iterator<char>(csv)), {});
  CHECK(all == std::string(csv_header) + "\n");

  const auto broken = write("broken.ini", "[isometry]\nseed = 1\nsamples = 0\n");
  CHECK(run("isometry --config " + broken + " --out " + (dir / "out").string()) == 2);
  CHECK(run("isometry --out " + (dir / "out").string()) == 2);
  const auto ok = write("ok.ini", "[isometry]\nseed = 1\nsamples = 300\nsteps = 16\nidentity_paths = 5\n");
  const int rc = run("all --config " + ok + " --out " + (dir / "out").string() + " --workers 1");
  CHECK((rc == 0 || rc == 1));
  CHECK(fs::exists(dir / "out" / "all.csv"));
  fs::remove_all(dir);
}
