#pragma once

#include <iosfwd>

#include "cli/config.hpp"

namespace denguecast::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNotConverged = 3;

// Each command is a pure function of (input files, config) to output files.
// Diagnostics go to `log`; I/O and format errors propagate as exceptions.

/// `cities.csv`, `series/<id>.csv`, `truth/<id>.csv` under `out`.
int cmd_simulate(const RunConfig& config, std::ostream& log);
/// `funnel.csv`, `cities.csv`, `series/<id>.csv` under `out`.
int cmd_ingest(const RunConfig& config, std::ostream& log);
/// `posterior/<id>.csv`, `diagnostics/<id>.csv`, `fit_summary.csv` under `out`.
int cmd_fit(const RunConfig& config, std::ostream& log);
/// `report.csv` under `out`.
int cmd_backtest(const RunConfig& config, std::ostream& log);
/// `comparison.csv`, `summary.txt` under `out`; the summary line is also logged.
int cmd_compare(const RunConfig& config, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace denguecast::cli
