#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace stochlab {

enum class Verdict { pass, fail, invalid, info };
std::string to_string(Verdict v);

/// One CSV row: experiment, n, rho, h, statistic, value, stderr, samples, seed, verdict.
struct ReportRow {
  std::string experiment;
  std::optional<std::size_t> n;
  std::optional<double> rho;
  std::optional<double> h;
  std::string statistic;
  double value = 0.0;
  std::optional<double> stderr_;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::info;
};

inline constexpr const char* csv_header = "experiment,n,rho,h,statistic,value,stderr,samples,seed,verdict";

std::string to_csv(const ReportRow& row);
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Rows whose verdict is fail or invalid.
std::vector<ReportRow> failures(const std::vector<ReportRow>& rows);

}  // namespace stochlab
