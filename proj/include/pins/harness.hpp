#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pins/market.hpp"
#include "pins/metrics.hpp"
#include "pins/regime.hpp"
#include "pins/retdist.hpp"
#include "pins/strategy.hpp"

namespace pins {

enum class Rebalance { daily, weekly, monthly };

int steps_per_year(Rebalance freq);
std::string to_string(Rebalance freq);
/// Throws ConfigError for anything but "daily", "weekly" or "monthly".
Rebalance parse_rebalance(const std::string& name);

/// Test hook: `zero` replaces every Brownian increment by 0.
enum class NoiseMode { random, zero };

struct StrategySpec {
    std::string label;
    std::variant<CppiSpec, VbpiSpec> spec;
};

struct SimulationPlan {
    MarketConfig market;  // steps_per_year is the monitoring grid
    RegimeModel model;
    std::vector<StrategySpec> strategies{};
    std::size_t n_paths = 10000;
    std::uint64_t master_seed = 42;
    Rebalance rebalance = Rebalance::daily;
    std::vector<double> thresholds{0.01, 0.02, 0.03, 0.04};
    std::vector<int> kappa_orders{2, 3};
    std::size_t histogram_bins = 50;
    unsigned workers = 0;  // 0: one per hardware thread
    NoiseMode noise = NoiseMode::random;
    std::shared_ptr<DistributionCache> cache{};  // optional, shared across runs

    void validate() const;
    RebalanceGrid grid() const;
};

struct Histogram {
    std::vector<double> edges;  // counts.size() + 1 entries
    std::vector<std::size_t> counts;
};

/// Uniform bins over [min, max]; the maximum lands in the last bin. A
/// constant sample yields a single bin holding everything.
Histogram histogram(const TerminalSample& sample, std::size_t n_bins);

struct StrategyResult {
    std::string label;
    TerminalSample sample;
    MetricsReport metrics;
    Histogram histogram;
    std::vector<double> vbpi_weights;  // inception schedule, VBPI only
};

struct RunInfo {
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::size_t n_steps = 0;
    std::size_t n_rebalances = 0;
    unsigned workers = 1;
    double seconds = 0.0;
    double paths_per_second = 0.0;
};

struct SimulationReport {
    std::vector<StrategyResult> strategies;
    RunInfo info;
};

/// Asset path j of a plan. Regime uniforms and Brownian normals come from
/// two disjoint counter-based substreams keyed by (master_seed, j); the
/// initial regime is drawn from the model's initial distribution.
AssetPath generate_path(const SimulationPlan& plan, const Eigen::MatrixXd& transition,
                        std::size_t j);

/// Monte Carlo run. Every strategy sees the same asset path per index and
/// results are reduced in index order, so output does not depend on the
/// worker count.
SimulationReport run(const SimulationPlan& plan);

}  // namespace pins
