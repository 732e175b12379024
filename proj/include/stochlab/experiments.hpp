#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochlab/config.hpp"
#include "stochlab/report.hpp"

namespace stochlab {

/// Runs one config section and returns its report rows.
std::vector<ReportRow> run_section(const ConfigSection& section, std::optional<std::uint64_t> seed_override = {});

/// Runs every section of `kind` in file order; kind "all" runs every section.
std::vector<ReportRow> run_subcommand(const ConfigPlan& plan, const std::string& kind,
                                      std::optional<std::uint64_t> seed_override = {});

/// Subcommands accepted by the command line: the experiment kinds and "all".
std::vector<std::string> subcommands();

}  // namespace stochlab
