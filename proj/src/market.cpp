#include "pins/market.hpp"

#include <cmath>

#include "pins/errors.hpp"

namespace pins {

void MarketConfig::validate() const {
    if (!(s0 > 0.0) || !(b0 > 0.0) || !(horizon > 0.0) || steps_per_year < 1 ||
        !std::isfinite(r)) {
        throw InvalidModel("market config requires s0 > 0, b0 > 0, horizon > 0, "
                           "steps_per_year >= 1 and finite r");
    }
    const double steps = horizon * steps_per_year;
    if (std::abs(steps - std::round(steps)) > 1e-9) {
        throw InvalidModel("horizon must span a whole number of grid steps");
    }
}

std::size_t MarketConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(horizon * steps_per_year));
}

double riskless_value(const MarketConfig& cfg, double t) { return cfg.b0 * std::exp(cfg.r * t); }

AssetPath sample_asset_path(const MarketConfig& cfg, const RegimeModel& model,
                            RegimePath regime_path, std::span<const double> normals) {
    const std::size_t n = cfg.n_steps();
    if (normals.size() != n || regime_path.states.size() != n + 1) {
        throw InvalidModel("sample_asset_path: normals/regimes do not match the grid");
    }
    const double dt = cfg.dt();
    const double sqrt_dt = std::sqrt(dt);
    const Eigen::VectorXd drift = model.log_drift() * dt;
    const Eigen::VectorXd vol = model.sigma() * sqrt_dt;

    AssetPath path;
    path.times.resize(n + 1);
    path.s.resize(n + 1);
    path.b.resize(n + 1);

    double log_s = std::log(cfg.s0);
    path.times[0] = 0.0;
    path.s[0] = cfg.s0;
    path.b[0] = cfg.b0;
    for (std::size_t k = 0; k < n; ++k) {
        const int state = regime_path.states[k];
        log_s += drift(state) + vol(state) * normals[k];
        path.times[k + 1] = cfg.time_at(k + 1);
        path.s[k + 1] = std::exp(log_s);
        path.b[k + 1] = riskless_value(cfg, path.times[k + 1]);
    }
    path.regimes = std::move(regime_path);
    return path;
}

}  // namespace pins
