#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "pins/market.hpp"
#include "pins/retdist.hpp"

namespace pins {

/// Guaranteed terminal value F_T = pi * V0, discounted at r before maturity.
struct FloorSchedule {
    double pi = 1.0;
    double v0 = 100.0;

    double terminal_floor() const { return pi * v0; }
    void validate() const;
};

/// e^{-r(T-t)} pi V0.
double floor_value(const FloorSchedule& floor, double r, double horizon, double t);

struct CppiSpec {
    double multiple = 1.0;
    double exposure_cap = 1.0;  // p: exposure never exceeds p * V
    FloorSchedule floor;

    void validate() const;
};

enum class VbpiBase { inception, rolling };

struct VbpiSpec {
    double confidence_level = 0.95;
    FloorSchedule floor;
    VbpiBase base = VbpiBase::inception;

    double alpha() const { return 1.0 - confidence_level; }
    void validate() const;
};

struct PortfolioPath {
    std::vector<double> times;
    std::vector<double> value;
    std::vector<double> risky_weight;
    std::vector<bool> locked;

    double terminal() const { return value.back(); }
};

/// Indices into the asset-path grid at which the portfolio is rebalanced:
/// 0, every, 2*every, ... strictly before the last node.
struct RebalanceGrid {
    std::size_t every = 1;

    std::vector<std::size_t> nodes(std::size_t n_steps) const;
};

/// min(m (v - f)^+, p v).
double cppi_exposure(const CppiSpec& spec, double v, double f);

/// Self-financing CPPI with sticky lock-in: once the cushion is exhausted at
/// a rebalance node the whole value compounds at the riskless step return.
PortfolioPath evolve_cppi(const CppiSpec& spec, const MarketConfig& cfg, const AssetPath& path,
                          const RebalanceGrid& grid);

/// Riskless fraction that puts the alpha-quantile of the portfolio exactly
/// on the floor, clamped into [0, 1]. Throws InfeasibleFloor when even a
/// fully riskless portfolio cannot reach F_t.
double vbpi_weight(const VbpiSpec& spec, const ReturnDistribution& dist, double v0, double r,
                   double t, double horizon);

/// Read-only map from horizon to return distribution.
class HorizonTable {
public:
    void add(double t, std::shared_ptr<const ReturnDistribution> dist);
    /// Throws ConfigError if no distribution is stored within 1e-9 of t.
    const ReturnDistribution& at(double t) const;
    bool contains(double t) const;

private:
    std::vector<std::pair<double, std::shared_ptr<const ReturnDistribution>>> entries_;
};

/// Horizons evolve_vbpi will look up for a given grid.
std::vector<double> vbpi_horizons(const VbpiSpec& spec, const MarketConfig& cfg,
                                  const RebalanceGrid& grid);

/// Inception-anchored riskless weights, one per rebalance node. Node 0 uses
/// the first rebalance date since the formula is 0/0 at t = 0.
std::vector<double> vbpi_weight_schedule(const VbpiSpec& spec, const MarketConfig& cfg,
                                         const RebalanceGrid& grid, const HorizonTable& dists);

PortfolioPath evolve_vbpi(const VbpiSpec& spec, const MarketConfig& cfg, const AssetPath& path,
                          const RebalanceGrid& grid, const HorizonTable& dists);

/// Same as evolve_vbpi in inception mode, with a precomputed schedule.
PortfolioPath evolve_vbpi_schedule(const VbpiSpec& spec, const MarketConfig& cfg,
                                   const AssetPath& path, const RebalanceGrid& grid,
                                   const std::vector<double>& weights);

/// m with m C0 = (1 - w0) V0. Throws NoInitialCushion when c0 <= 0.
double match_multiple(double w0, double v0, double c0);

}  // namespace pins
