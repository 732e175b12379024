#include "stochlab/report.hpp"

#include <fmt/format.h>

namespace stochlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::invalid: return "invalid";
    case Verdict::info: return "info";
  }
  return "info";
}

namespace {

std::string number(std::optional<double> x) { return x ? fmt::format("{:.12g}", *x) : std::string(); }

}  // namespace

std::string to_csv(const ReportRow& row) {
  return fmt::format("{},{},{},{},{},{:.12g},{},{},{},{}", row.experiment, row.n ? std::to_string(*row.n) : "",
                     number(row.rho), number(row.h), row.statistic, row.value, number(row.stderr_), row.samples,
                     row.seed, to_string(row.verdict));
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << csv_header << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
}

std::vector<ReportRow> failures(const std::vector<ReportRow>& rows) {
  std::vector<ReportRow> out;
  for (const auto& r : rows)
    if (r.verdict == Verdict::fail || r.verdict == Verdict::invalid) out.push_back(r);
  return out;
}

}  // namespace stochlab
