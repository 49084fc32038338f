#include "pins/retdist.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "pins/errors.hpp"
#include "pins/expm.hpp"

namespace pins {

namespace {

// |phi_t(theta)| <= exp(-theta^2 min(sigma)^2 t / 2); past this exponent the
// transform is below the smallest normal double and is taken as zero.
constexpr double kDecayCutoff = 700.0;

}  // namespace

CharFnModel::CharFnModel(const RegimeModel& m, double horizon) : model(&m), t(horizon) {
    if (!(horizon > 0.0)) {
        throw InvalidModel("characteristic function horizon must be positive");
    }
}

Eigen::MatrixXcd b_gamma(const RegimeModel& model, std::complex<double> gamma) {
    Eigen::MatrixXcd b = model.generator().transpose().cast<std::complex<double>>();
    const Eigen::VectorXd drift = model.log_drift();
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        const double var = model.sigma()(i) * model.sigma()(i);
        b(i, i) += gamma * drift(i) + 0.5 * gamma * gamma * var;
    }
    return b;
}

std::complex<double> char_fn(const CharFnModel& cf, double theta) {
    const RegimeModel& model = *cf.model;
    const Eigen::MatrixXcd e = expm(b_gamma(model, {0.0, theta}) * cf.t);
    // <exp(B t) e_i, 1> is the i-th column sum.
    const Eigen::RowVectorXcd col_sums = e.colwise().sum();
    std::complex<double> phi = 0.0;
    for (Eigen::Index i = 0; i < col_sums.size(); ++i) {
        phi += model.initial_dist()(i) * col_sums(i);
    }
    if (!std::isfinite(phi.real()) || !std::isfinite(phi.imag()) || std::abs(phi) > 1.0 + 1e-9) {
        throw NumericFailure("characteristic function out of range at theta = " +
                             std::to_string(theta));
    }
    return phi;
}

double ReturnDistribution::cdf_at(double s) const {
    const Eigen::Index n = size();
    const double pos = (s - s_min) / ds;
    if (pos <= 0.0) {
        return pos == 0.0 ? cdf(0) : 0.0;
    }
    if (pos >= static_cast<double>(n - 1)) {
        return 1.0;
    }
    const auto k = static_cast<Eigen::Index>(pos);
    const double frac = pos - static_cast<double>(k);
    return cdf(k) + frac * (cdf(k + 1) - cdf(k));
}

ReturnDistribution build_distribution(const CharFnModel& cf, FftSettings settings) {
    const int n = settings.n_fft;
    if (n < (1 << 10) || (n & (n - 1)) != 0) {
        throw InvalidModel("n_fft must be a power of two >= 1024");
    }
    if (!(settings.width_sigmas > 0.0)) {
        throw InvalidModel("width_sigmas must be positive");
    }
    const RegimeModel& model = *cf.model;
    const double t = cf.t;
    const double center = model.initial_dist().dot(model.log_drift()) * t;
    const double half_width = settings.width_sigmas * model.sigma().maxCoeff() * std::sqrt(t);
    const double ds = 2.0 * half_width / n;
    const double dtheta = 2.0 * std::numbers::pi / (n * ds);
    const double s_min = center - half_width;
    const double min_var = model.sigma().minCoeff() * model.sigma().minCoeff();

    // f(s_k) = (dtheta/pi) Re sum_j w_j phi(theta_j) e^{-i theta_j s_min} e^{-2 pi i jk/n}
    std::vector<std::complex<double>> weighted(n, {0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        const double theta = j * dtheta;
        if (0.5 * theta * theta * min_var * t > kDecayCutoff) {
            break;
        }
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        weighted[j] = w * char_fn(cf, theta) * std::polar(1.0, -theta * s_min);
    }
    std::vector<std::complex<double>> transformed;
    Eigen::FFT<double> fft;
    fft.fwd(transformed, weighted);

    ReturnDistribution dist;
    dist.t = t;
    dist.s_min = s_min;
    dist.ds = ds;
    dist.s_grid.resize(n);
    dist.pdf.resize(n);
    dist.cdf.resize(n);
    const double scale = dtheta / std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        dist.s_grid(k) = s_min + k * ds;
        dist.pdf(k) = std::max(0.0, scale * transformed[k].real());
    }
    // The DFT periodizes the density, so the trapezoid mass stays near 1 even
    // when the window clips the tails. Density left at the window edges is the
    // visible trace of that wrap-around.
    const double edge_mass = (dist.pdf(0) + dist.pdf(n - 1)) * half_width;
    if (edge_mass > 1e-3) {
        throw GridTooNarrow("density does not decay inside the window at t = " +
                            std::to_string(t) + " (edge mass " + std::to_string(edge_mass) +
                            "); increase width_sigmas");
    }
    dist.cdf(0) = 0.0;
    for (int k = 1; k < n; ++k) {
        dist.cdf(k) = dist.cdf(k - 1) + 0.5 * ds * (dist.pdf(k - 1) + dist.pdf(k));
    }
    dist.raw_mass = dist.cdf(n - 1);
    if (dist.raw_mass < 0.999 || dist.raw_mass > 1.001) {
        throw GridTooNarrow("recovered probability mass " + std::to_string(dist.raw_mass) +
                            " at t = " + std::to_string(t) +
                            "; increase width_sigmas or n_fft");
    }
    dist.cdf /= dist.raw_mass;
    dist.cdf(n - 1) = 1.0;
    return dist;
}

double quantile(const ReturnDistribution& dist, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidModel("quantile level must lie in (0, 1)");
    }
    const Eigen::Index n = dist.size();
    if (n < 2 || alpha < dist.cdf(0) || alpha > dist.cdf(n - 1)) {
        throw InsufficientResolution("quantile level " + std::to_string(alpha) +
                                     " is outside the resolved CDF range");
    }
    const double* begin = dist.cdf.data();
    const double* end = begin + n;
    // First node with cdf > alpha; the bracket is [k-1, k].
    const auto k = static_cast<Eigen::Index>(std::upper_bound(begin, end, alpha) - begin);
    if (k == 0) {
        return dist.s_grid(0);
    }
    if (k == n) {
        return dist.s_grid(n - 1);
    }
    const double lo = dist.cdf(k - 1);
    const double hi = dist.cdf(k);
    const double frac = (alpha - lo) / (hi - lo);
    return dist.s_grid(k - 1) + frac * dist.ds;
}

void write_distribution_csv(std::ostream& out, const ReturnDistribution& dist) {
    out << "s,pdf,cdf\n";
    char buf[128];
    for (Eigen::Index k = 0; k < dist.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", dist.s_grid(k), dist.pdf(k),
                      dist.cdf(k));
        out << buf;
    }
}

DistributionCache::DistributionCache(const RegimeModel& model, FftSettings settings)
    : model_(model), settings_(settings) {}

std::shared_ptr<const ReturnDistribution> DistributionCache::get(double t) {
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.lower_bound(t - 1e-12);
        if (it != entries_.end() && std::abs(it->first - t) <= 1e-12) {
            return it->second;
        }
    }
    // Built outside the lock; a concurrent builder of the same horizon
    // produces an identical result, and the first insert wins.
    auto dist = std::make_shared<const ReturnDistribution>(
        build_distribution(CharFnModel(model_, t), settings_));
    std::lock_guard lock(mutex_);
    auto it = entries_.lower_bound(t - 1e-12);
    if (it != entries_.end() && std::abs(it->first - t) <= 1e-12) {
        return it->second;
    }
    entries_.emplace(t, dist);
    return dist;
}

std::size_t DistributionCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<std::shared_ptr<const ReturnDistribution>> DistributionCache::entries() const {
    std::lock_guard lock(mutex_);
    std::vector<std::shared_ptr<const ReturnDistribution>> out;
    out.reserve(entries_.size());
    for (const auto& [t, dist] : entries_) {
        out.push_back(dist);
    }
    return out;
}

}  // namespace pins
