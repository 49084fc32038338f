#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pins/harness.hpp"
#include "pins/market.hpp"
#include "pins/regime.hpp"
#include "pins/retdist.hpp"
#include "pins/strategy.hpp"

namespace pins {

/// Everything a full experiment needs; see docs/config.md for the file
/// format. The market grid of each cell follows the rebalance frequency
/// unless `daily_monitoring` is set.
struct ExperimentConfig {
    // market
    double r = 0.04;
    double s0 = 100.0;
    double b0 = 1.0;
    double horizon = 1.0;

    // model
    Eigen::MatrixXd generator;
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma;
    std::optional<Eigen::VectorXd> initial_dist;

    // strategy
    double v0 = 100.0;
    double pi = 1.0;
    double exposure_cap = 1.0;
    std::vector<double> confidence_levels{0.90, 0.95, 0.99};
    VbpiBase vbpi_base = VbpiBase::inception;
    std::vector<int> kappa_orders{2, 3};
    std::vector<double> thresholds{0.01, 0.02, 0.03, 0.04};

    // sim
    std::size_t paths = 10000;
    std::uint64_t seed = 42;
    std::vector<Rebalance> rebalance{Rebalance::daily, Rebalance::weekly, Rebalance::monthly};
    bool daily_monitoring = false;
    unsigned workers = 0;

    // output
    std::filesystem::path out_dir = "results";
    std::size_t histogram_bins = 50;
    bool dump_distributions = false;

    FftSettings fft;

    std::vector<std::string> warnings;

    RegimeModel model() const;
    MarketConfig market(Rebalance freq) const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Parses YAML text. Throws ConfigError with line information on syntax
/// errors and with the field name on validation errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace pins
