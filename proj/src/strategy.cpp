#include "pins/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "pins/errors.hpp"

namespace pins {

void FloorSchedule::validate() const {
    if (!(pi >= 0.0 && pi <= 1.0) || !(v0 > 0.0)) {
        throw InputError("floor requires 0 <= pi <= 1 and v0 > 0");
    }
}

double floor_value(const FloorSchedule& floor, double r, double horizon, double t) {
    return std::exp(-r * (horizon - t)) * floor.terminal_floor();
}

void CppiSpec::validate() const {
    floor.validate();
    if (!(multiple >= 0.0) || !(exposure_cap > 0.0)) {
        throw InputError("CPPI requires multiple >= 0 and exposure cap > 0");
    }
}

void VbpiSpec::validate() const {
    floor.validate();
    if (!(confidence_level > 0.5 && confidence_level < 1.0)) {
        throw InputError("VBPI confidence level must lie in (0.5, 1), got " +
                         std::to_string(confidence_level));
    }
}

std::vector<std::size_t> RebalanceGrid::nodes(std::size_t n_steps) const {
    if (every == 0 || n_steps % every != 0) {
        throw InputError("rebalance interval must divide the market grid");
    }
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < n_steps; n += every) {
        out.push_back(n);
    }
    return out;
}

double cppi_exposure(const CppiSpec& spec, double v, double f) {
    const double cushion = std::max(v - f, 0.0);
    return std::min(spec.multiple * cushion, spec.exposure_cap * v);
}

namespace {

// Runs a self-financing two-asset portfolio. At every rebalance node the
// allocator returns the risky exposure in currency, or a negative value to
// request lock-in (all riskless from then on, compounding step by step).
// Between nodes the units bought at the node are held.
using Allocator = std::function<double(std::size_t node_index, std::size_t grid_index,
                                       double value, bool& pinned)>;

PortfolioPath evolve(const FloorSchedule& floor, const AssetPath& path,
                     const RebalanceGrid& grid, const Allocator& allocate) {
    const std::size_t n = path.n_steps();
    const std::vector<std::size_t> nodes = grid.nodes(n);

    PortfolioPath out;
    out.times = path.times;
    out.value.assign(n + 1, 0.0);
    out.risky_weight.assign(n + 1, 0.0);
    out.locked.assign(n + 1, false);
    out.value[0] = floor.v0;

    bool locked = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t start = nodes[i];
        const std::size_t stop = (i + 1 < nodes.size()) ? nodes[i + 1] : n;
        const double v = out.value[start];

        double exposure = 0.0;
        bool pinned = false;
        if (!locked) {
            exposure = allocate(i, start, v, pinned);
            if (exposure < 0.0) {
                locked = true;
                exposure = 0.0;
            }
        }
        if (locked) {
            for (std::size_t k = start; k < stop; ++k) {
                out.value[k + 1] = out.value[k] * (path.b[k + 1] / path.b[k]);
                out.locked[k] = out.locked[k + 1] = true;
                out.risky_weight[k] = out.risky_weight[k + 1] = 0.0;
            }
            continue;
        }
        out.locked[start] = pinned;
        out.risky_weight[start] = v != 0.0 ? exposure / v : 0.0;
        const double bond = v - exposure;
        for (std::size_t k = start + 1; k <= stop; ++k) {
            const double risky_gain = exposure * (path.s[k] / path.s[start] - 1.0);
            const double bond_gain = bond * (path.b[k] / path.b[start] - 1.0);
            out.value[k] = v + risky_gain + bond_gain;
            // Overwritten by the next rebalance when k == stop < n.
            out.locked[k] = pinned;
            out.risky_weight[k] = (exposure + risky_gain) / out.value[k];
        }
    }
    return out;
}

}  // namespace

PortfolioPath evolve_cppi(const CppiSpec& spec, const MarketConfig& cfg, const AssetPath& path,
                          const RebalanceGrid& grid) {
    spec.validate();
    auto allocate = [&](std::size_t, std::size_t k, double v, bool&) {
        const double f = floor_value(spec.floor, cfg.r, cfg.horizon, path.times[k]);
        if (v - f <= 0.0) {
            return -1.0;
        }
        return cppi_exposure(spec, v, f);
    };
    return evolve(spec.floor, path, grid, allocate);
}

double vbpi_weight(const VbpiSpec& spec, const ReturnDistribution& dist, double v0, double r,
                   double t, double horizon) {
    const double f = floor_value(spec.floor, r, horizon, t);
    const double bond_growth = std::exp(r * t);
    if (f > v0 * bond_growth) {
        throw InfeasibleFloor("floor " + std::to_string(f) + " at t = " + std::to_string(t) +
                              " exceeds the riskless value " + std::to_string(v0 * bond_growth));
    }
    const double var_growth = std::exp(quantile(dist, spec.alpha()));
    if (v0 * var_growth >= f) {
        return 0.0;
    }
    // Here var_growth < f / v0 <= bond_growth, so the denominator is positive.
    const double raw = (f - v0 * var_growth) / (v0 * (bond_growth - var_growth));
    return std::clamp(raw, 0.0, 1.0);
}

void HorizonTable::add(double t, std::shared_ptr<const ReturnDistribution> dist) {
    entries_.emplace_back(t, std::move(dist));
}

bool HorizonTable::contains(double t) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [t](const auto& e) { return std::abs(e.first - t) <= 1e-9; });
}

const ReturnDistribution& HorizonTable::at(double t) const {
    for (const auto& [horizon, dist] : entries_) {
        if (std::abs(horizon - t) <= 1e-9) {
            return *dist;
        }
    }
    throw ConfigError("no return distribution for horizon " + std::to_string(t));
}

std::vector<double> vbpi_horizons(const VbpiSpec& spec, const MarketConfig& cfg,
                                  const RebalanceGrid& grid) {
    const std::size_t n = cfg.n_steps();
    const auto nodes = grid.nodes(n);
    std::vector<double> out;
    if (spec.base == VbpiBase::inception) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t k = (i == 0) ? std::min(grid.every, n) : nodes[i];
            out.push_back(cfg.time_at(k));
        }
    } else {
        for (std::size_t node : nodes) {
            out.push_back(cfg.horizon - cfg.time_at(node));
        }
    }
    return out;
}

std::vector<double> vbpi_weight_schedule(const VbpiSpec& spec, const MarketConfig& cfg,
                                         const RebalanceGrid& grid, const HorizonTable& dists) {
    spec.validate();
    if (spec.base != VbpiBase::inception) {
        throw InputError("weight schedules are path independent only in inception mode");
    }
    std::vector<double> weights;
    for (double t : vbpi_horizons(spec, cfg, grid)) {
        weights.push_back(vbpi_weight(spec, dists.at(t), spec.floor.v0, cfg.r, t, cfg.horizon));
    }
    return weights;
}

PortfolioPath evolve_vbpi_schedule(const VbpiSpec& spec, const MarketConfig& /*cfg*/,
                                   const AssetPath& path, const RebalanceGrid& grid,
                                   const std::vector<double>& weights) {
    auto allocate = [&](std::size_t i, std::size_t, double v, bool& pinned) {
        const double w = weights.at(i);
        pinned = (w == 0.0 || w == 1.0);
        return (1.0 - w) * v;
    };
    return evolve(spec.floor, path, grid, allocate);
}

PortfolioPath evolve_vbpi(const VbpiSpec& spec, const MarketConfig& cfg, const AssetPath& path,
                          const RebalanceGrid& grid, const HorizonTable& dists) {
    spec.validate();
    if (spec.base == VbpiBase::inception) {
        return evolve_vbpi_schedule(spec, cfg, path, grid, vbpi_weight_schedule(spec, cfg, grid, dists));
    }
    // Rolling: re-anchor at the current value over the remaining horizon.
    const double terminal_floor = spec.floor.terminal_floor();
    auto allocate = [&](std::size_t, std::size_t k, double v, bool& pinned) {
        const double tau = cfg.horizon - path.times[k];
        double w = 1.0;
        if (v * std::exp(cfg.r * tau) > terminal_floor) {
            FloorSchedule local = spec.floor;
            local.v0 = v;
            local.pi = terminal_floor / v;
            VbpiSpec rolled = spec;
            rolled.floor = local;
            w = vbpi_weight(rolled, dists.at(tau), v, cfg.r, tau, tau);
        }
        pinned = (w == 0.0 || w == 1.0);
        return (1.0 - w) * v;
    };
    return evolve(spec.floor, path, grid, allocate);
}

double match_multiple(double w0, double v0, double c0) {
    if (!(c0 > 0.0)) {
        throw NoInitialCushion("initial cushion " + std::to_string(c0) +
                               " is not positive; lower the guaranteed fraction");
    }
    return (1.0 - w0) * v0 / c0;
}

}  // namespace pins
