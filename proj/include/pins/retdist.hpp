#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "pins/regime.hpp"

namespace pins {

/// Law of the log-return R_t = ln(S_t / S_0) at a fixed horizon t.
struct CharFnModel {
    const RegimeModel* model = nullptr;
    double t = 1.0;

    CharFnModel(const RegimeModel& m, double horizon);
};

/// Q' + diag(gamma (mu_i - sigma_i^2/2) + gamma^2 sigma_i^2 / 2).
Eigen::MatrixXcd b_gamma(const RegimeModel& model, std::complex<double> gamma);

/// phi_t(theta) = sum_i p_i(0) <exp(B_{i theta} t) e_i, 1>.
std::complex<double> char_fn(const CharFnModel& cf, double theta);

/// Density and CDF of R_t sampled on a uniform grid.
struct ReturnDistribution {
    double t = 0.0;
    double s_min = 0.0;
    double ds = 0.0;
    Eigen::VectorXd s_grid;
    Eigen::VectorXd pdf;
    Eigen::VectorXd cdf;
    double raw_mass = 0.0;  // trapezoidal mass before renormalization

    Eigen::Index size() const { return s_grid.size(); }
    /// Linear interpolation of the CDF; 0 left of the grid, 1 right of it.
    double cdf_at(double s) const;
};

struct FftSettings {
    int n_fft = 1 << 13;
    double width_sigmas = 12.0;
};

/// Fourier inversion of phi_t on a grid centred at the mean log-drift times t,
/// with half-width width_sigmas * max(sigma) * sqrt(t). Throws GridTooNarrow
/// when the recovered mass is outside [0.999, 1.001] or the density has not
/// decayed at the window edges.
ReturnDistribution build_distribution(const CharFnModel& cf, FftSettings settings = {});

/// alpha-quantile of R_t by linear interpolation of the CDF.
double quantile(const ReturnDistribution& dist, double alpha);

/// One "s,pdf,cdf" row per grid node, with header.
void write_distribution_csv(std::ostream& out, const ReturnDistribution& dist);

/// Distributions keyed by horizon for one model; thread-safe. Horizons that
/// differ by less than 1e-12 share an entry.
class DistributionCache {
public:
    explicit DistributionCache(const RegimeModel& model, FftSettings settings = {});

    std::shared_ptr<const ReturnDistribution> get(double t);
    const RegimeModel& model() const { return model_; }
    std::size_t size() const;
    /// Snapshot of the stored distributions in increasing horizon order.
    std::vector<std::shared_ptr<const ReturnDistribution>> entries() const;

private:
    RegimeModel model_;
    FftSettings settings_;
    mutable std::mutex mutex_;
    std::map<double, std::shared_ptr<const ReturnDistribution>> entries_;
};

}  // namespace pins
