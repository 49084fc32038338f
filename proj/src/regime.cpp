#include "pins/regime.hpp"

#include <cmath>
#include <string>

#include "pins/errors.hpp"
#include "pins/expm.hpp"

namespace pins {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kProbSumTol = 1e-12;

void validate_generator(const Eigen::MatrixXd& q) {
    if (q.rows() == 0 || q.rows() != q.cols()) {
        throw InvalidModel("generator must be a non-empty square matrix");
    }
    if (!q.allFinite()) {
        throw InvalidModel("generator has non-finite entries");
    }
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            if (i != j && q(i, j) < 0.0) {
                throw InvalidModel("generator row " + std::to_string(i) +
                                   " has a negative off-diagonal rate");
            }
        }
        if (std::abs(q.row(i).sum()) > kRowSumTol) {
            throw InvalidModel("generator row " + std::to_string(i) + " does not sum to zero");
        }
    }
}

}  // namespace

RegimeModel::RegimeModel(Eigen::MatrixXd generator, Eigen::VectorXd mu, Eigen::VectorXd sigma,
                         Eigen::VectorXd initial_dist)
    : generator_(std::move(generator)),
      mu_(std::move(mu)),
      sigma_(std::move(sigma)),
      initial_dist_(std::move(initial_dist)) {
    validate_generator(generator_);
    const auto h = generator_.rows();
    if (mu_.size() != h || sigma_.size() != h || initial_dist_.size() != h) {
        throw InvalidModel("mu, sigma and initial_dist must have one entry per regime");
    }
    if (!mu_.allFinite() || !sigma_.allFinite()) {
        throw InvalidModel("regime parameters must be finite");
    }
    if ((sigma_.array() <= 0.0).any()) {
        throw InvalidModel("every regime volatility must be positive");
    }
    if ((initial_dist_.array() < 0.0).any() ||
        std::abs(initial_dist_.sum() - 1.0) > kProbSumTol) {
        throw InvalidModel("initial_dist must be a probability vector");
    }
}

RegimeModel::RegimeModel(Eigen::MatrixXd generator, Eigen::VectorXd mu, Eigen::VectorXd sigma)
    : RegimeModel(generator, std::move(mu), std::move(sigma),
                  (validate_generator(generator), stationary_distribution(generator))) {}

RegimeModel RegimeModel::single(double mu, double sigma) {
    return RegimeModel(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, mu),
                       Eigen::VectorXd::Constant(1, sigma), Eigen::VectorXd::Ones(1));
}

Eigen::VectorXd RegimeModel::log_drift() const {
    return mu_.array() - 0.5 * sigma_.array().square();
}

Eigen::MatrixXd transition_matrix(const RegimeModel& model, double dt) {
    if (!(dt > 0.0)) {
        throw InvalidModel("transition_matrix: dt must be positive");
    }
    Eigen::MatrixXd p = expm(model.generator() * dt);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (p(i, j) < 0.0 && p(i, j) > -1e-12) {
                p(i, j) = 0.0;
            }
        }
    }
    return p;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& generator) {
    const auto h = generator.rows();
    if (h == 1) {
        return Eigen::VectorXd::Ones(1);
    }
    // pi Q = 0 with one balance equation swapped for the normalization row.
    Eigen::MatrixXd a = generator.transpose();
    a.row(h - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(h);
    rhs(h - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw NoUniqueStationary("generator has no unique stationary distribution");
    }
    Eigen::VectorXd pi = lu.solve(rhs);

    const double residual = (pi.transpose() * generator).cwiseAbs().maxCoeff();
    if ((pi.array() < -1e-12).any() || residual > 1e-10) {
        throw NoUniqueStationary("generator has no unique stationary distribution");
    }
    pi = pi.cwiseMax(0.0);
    // A reducible chain can still give an invertible system with a pi that
    // puts zero mass on a transient class; uniqueness needs a single class.
    if ((pi.array() <= 0.0).any()) {
        throw NoUniqueStationary("generator is reducible");
    }
    return pi / pi.sum();
}

Eigen::VectorXd stationary_distribution(const RegimeModel& model) {
    return stationary_distribution(model.generator());
}

int draw_state(const Eigen::Ref<const Eigen::RowVectorXd>& probabilities, double u) {
    double cumulative = 0.0;
    const auto h = probabilities.size();
    for (Eigen::Index j = 0; j + 1 < h; ++j) {
        cumulative += probabilities(j);
        if (cumulative > u) {
            return static_cast<int>(j);
        }
    }
    return static_cast<int>(h - 1);
}

RegimePath sample_regime_path(const Eigen::MatrixXd& transition, double dt,
                              std::span<const double> uniforms, int initial_state) {
    if (initial_state < 0 || initial_state >= transition.rows()) {
        throw InvalidModel("initial_state out of range");
    }
    RegimePath path;
    path.dt = dt;
    path.states.resize(uniforms.size() + 1);
    path.states[0] = initial_state;
    for (std::size_t k = 0; k < uniforms.size(); ++k) {
        path.states[k + 1] = draw_state(transition.row(path.states[k]), uniforms[k]);
    }
    return path;
}

RegimePath sample_regime_path(const RegimeModel& model, std::size_t n_steps, double dt,
                              std::span<const double> uniforms, int initial_state) {
    if (uniforms.size() != n_steps) {
        throw InvalidModel("sample_regime_path: need one uniform per step");
    }
    return sample_regime_path(transition_matrix(model, dt), dt, uniforms, initial_state);
}

}  // namespace pins
