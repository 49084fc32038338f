#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace pins {

/// Continuous-time Markov chain driving a regime-switching GBM.
///
/// Regimes are indexed 0..H-1 in code. The generator is in units of 1/year,
/// drifts in 1/year and volatilities in 1/sqrt(year). Instances are
/// validated on construction and immutable afterwards.
class RegimeModel {
public:
    /// Throws InvalidModel if a row of the generator does not sum to zero,
    /// an off-diagonal rate is negative, a volatility is not positive, or
    /// the initial distribution is not a probability vector.
    RegimeModel(Eigen::MatrixXd generator, Eigen::VectorXd mu, Eigen::VectorXd sigma,
                Eigen::VectorXd initial_dist);

    /// Same, with the initial distribution set to the stationary law of the
    /// chain (requires an irreducible generator).
    RegimeModel(Eigen::MatrixXd generator, Eigen::VectorXd mu, Eigen::VectorXd sigma);

    /// Single-regime (plain GBM) model.
    static RegimeModel single(double mu, double sigma);

    Eigen::Index num_states() const { return generator_.rows(); }
    const Eigen::MatrixXd& generator() const { return generator_; }
    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }
    const Eigen::VectorXd& initial_dist() const { return initial_dist_; }

    /// Log-drift mu_i - sigma_i^2 / 2 per regime.
    Eigen::VectorXd log_drift() const;

private:
    Eigen::MatrixXd generator_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd sigma_;
    Eigen::VectorXd initial_dist_;
};

struct RegimePath {
    std::vector<int> states;  // one per grid node, 0-based
    double dt = 0.0;
};

/// exp(Q dt); tiny negative round-off entries are clamped to zero.
Eigen::MatrixXd transition_matrix(const RegimeModel& model, double dt);

/// Solves pi Q = 0, sum(pi) = 1. Throws NoUniqueStationary for reducible or
/// degenerate generators.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& generator);
Eigen::VectorXd stationary_distribution(const RegimeModel& model);

/// Cumulative-threshold sampler on a fixed grid: the next state is the
/// smallest j whose cumulative row probability strictly exceeds the uniform.
/// `transition` is a precomputed exp(Q dt) so hot loops do not recompute it.
RegimePath sample_regime_path(const Eigen::MatrixXd& transition, double dt,
                              std::span<const double> uniforms, int initial_state);

RegimePath sample_regime_path(const RegimeModel& model, std::size_t n_steps, double dt,
                              std::span<const double> uniforms, int initial_state);

/// Smallest j such that cumulative(probabilities[0..j]) > u; H-1 if none.
int draw_state(const Eigen::Ref<const Eigen::RowVectorXd>& probabilities, double u);

}  // namespace pins
