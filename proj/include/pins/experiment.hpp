#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pins/config.hpp"
#include "pins/harness.hpp"

namespace pins {

/// One (rebalance, CL) pair of the experiment matrix with its matched
/// CPPI multiple.
struct MatrixCell {
    Rebalance rebalance = Rebalance::daily;
    double confidence_level = 0.9;
    double vbpi_w0 = 0.0;
    double cppi_multiple = 0.0;
};

/// File-name stem of a cell, e.g. "cppi_daily_cl90".
std::string cell_name(const std::string& strategy, Rebalance freq, double confidence_level);

/// Expands rebalance x CL and matches each CPPI multiple to the VBPI
/// initial risky allocation.
std::vector<MatrixCell> expand_matrix(const ExperimentConfig& cfg, DistributionCache& cache);

/// Harness plan for all cells that share a rebalance frequency.
SimulationPlan make_plan(const ExperimentConfig& cfg, Rebalance freq,
                         const std::vector<MatrixCell>& cells,
                         std::shared_ptr<DistributionCache> cache);

/// metrics.csv header for the configured thresholds and Kappa orders.
std::string metrics_header(const ExperimentConfig& cfg);
/// One metrics.csv line (no trailing newline). Numbers use 6 significant
/// digits; infinities and undefined values are written as inf / nan.
std::string metrics_row(const std::string& strategy, Rebalance freq, double confidence_level,
                        const MetricsReport& metrics);

/// Formats with printf-style %.{digits}g, mapping non-finite values to
/// "inf", "-inf" or "nan".
std::string format_number(double value, int digits);

struct RunOptions {
    bool dry_run = false;
};

/// Exit codes returned by run_experiment.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

/// Runs the whole matrix and writes metrics.csv, terminal_values_<cell>.csv,
/// histogram_<cell>.csv, run_info.txt and, if requested, distribution dumps
/// into cfg.out_dir. Files written by a failed run are removed.
int run_experiment(const ExperimentConfig& cfg, const RunOptions& options, std::ostream& log);

}  // namespace pins
