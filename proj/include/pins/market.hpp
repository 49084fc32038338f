#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pins/regime.hpp"

namespace pins {

struct MarketConfig {
    double r = 0.04;       // continuously compounded risk-free rate
    double s0 = 100.0;     // initial risky price
    double b0 = 1.0;       // initial riskless price
    double horizon = 1.0;  // years
    int steps_per_year = 260;

    /// Throws InvalidModel when a field is out of range or the horizon is
    /// not an integer number of grid steps.
    void validate() const;
    std::size_t n_steps() const;
    double dt() const { return 1.0 / steps_per_year; }
    double time_at(std::size_t n) const { return static_cast<double>(n) * dt(); }
};

struct AssetPath {
    std::vector<double> times;
    std::vector<double> s;
    std::vector<double> b;
    RegimePath regimes;

    std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
};

/// b0 * exp(r t).
double riskless_value(const MarketConfig& cfg, double t);

/// Exact log-Euler step per frozen regime, using the regime at the start of
/// each step. `normals` holds one standard normal per step.
AssetPath sample_asset_path(const MarketConfig& cfg, const RegimeModel& model,
                            RegimePath regime_path, std::span<const double> normals);

}  // namespace pins
