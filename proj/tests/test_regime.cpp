#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "pins/errors.hpp"
#include "pins/regime.hpp"

namespace {

Eigen::MatrixXd two_state(double a, double b) {
    Eigen::MatrixXd q(2, 2);
    q << -a, a, b, -b;
    return q;
}

pins::RegimeModel reference_model() {
    Eigen::Vector2d mu(0.14, -0.01);
    Eigen::Vector2d sigma(0.16, 0.20);
    return pins::RegimeModel(two_state(0.25, 0.25), mu, sigma);
}

}  // namespace

TEST_CASE("model validation") {
    const Eigen::Vector2d mu(0.1, 0.1);
    const Eigen::Vector2d sigma(0.2, 0.2);
    const Eigen::Vector2d p(0.5, 0.5);
    Eigen::MatrixXd bad_row = two_state(0.25, 0.25);
    bad_row(0, 0) = -0.2;
    CHECK_THROWS_AS(pins::RegimeModel(bad_row, mu, sigma, p), pins::InvalidModel);
    Eigen::MatrixXd negative(2, 2);
    negative << 0.1, -0.1, 0.0, 0.0;
    CHECK_THROWS_AS(pins::RegimeModel(negative, mu, sigma, p), pins::InvalidModel);
    CHECK_THROWS_AS(pins::RegimeModel(two_state(1, 1), mu, Eigen::Vector2d(0.2, 0.0), p),
                    pins::InvalidModel);
    CHECK_THROWS_AS(pins::RegimeModel(two_state(1, 1), mu, sigma, Eigen::Vector2d(0.6, 0.6)),
                    pins::InvalidModel);
    CHECK_THROWS_AS(pins::RegimeModel(two_state(1, 1), mu, sigma, Eigen::Vector2d(1.2, -0.2)),
                    pins::InvalidModel);
    Eigen::MatrixXd nan_q = two_state(1, 1);
    nan_q(0, 1) = std::nan("");
    CHECK_THROWS_AS(pins::RegimeModel(nan_q, mu, sigma, p), pins::InvalidModel);
}

TEST_CASE("default initial distribution is stationary") {
    const pins::RegimeModel m(two_state(1, 3), Eigen::Vector2d(0.1, 0.0), Eigen::Vector2d(0.1, 0.2));
    CHECK(m.initial_dist()(0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.initial_dist()(1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("transition matrix of the symmetric generator") {
    const auto m = reference_model();
    const Eigen::MatrixXd p = pins::transition_matrix(m, 1.0 / 260.0);
    const double stay = oracle::symmetric_stay(0.25, 1.0 / 260.0);
    CHECK(stay == doctest::Approx(0.999039385502295142).epsilon(1e-15));
    CHECK(p(0, 0) == doctest::Approx(0.999039385502295142).epsilon(1e-14));
    CHECK(p(1, 1) == doctest::Approx(0.999039385502295142).epsilon(1e-14));
    CHECK(p(0, 1) == doctest::Approx(0.000960614497704857).epsilon(1e-10));
    CHECK(p(1, 0) == doctest::Approx(0.000960614497704857).epsilon(1e-10));
}

TEST_CASE("transition matrix edge cases") {
    const pins::RegimeModel zero(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(0.1, 0.0),
                                 Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.3, 0.7));
    CHECK(pins::transition_matrix(zero, 3.0).isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-15));
    const auto m = reference_model();
    const Eigen::MatrixXd tiny = pins::transition_matrix(m, 1e-10);
    CHECK((tiny - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THROWS_AS(pins::transition_matrix(m, 0.0), pins::InvalidModel);
}

TEST_CASE("Chapman-Kolmogorov and row-stochasticity") {
    Eigen::MatrixXd q(3, 3);
    q << -1.1, 0.6, 0.5, 0.2, -0.9, 0.7, 2.0, 0.0, -2.0;
    const pins::RegimeModel m(q, Eigen::Vector3d(0.1, 0.0, -0.1), Eigen::Vector3d(0.1, 0.2, 0.3));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(1e-6, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = u(gen);
        const double b = u(gen);
        const Eigen::MatrixXd pa = pins::transition_matrix(m, a);
        const Eigen::MatrixXd pb = pins::transition_matrix(m, b);
        const Eigen::MatrixXd pab = pins::transition_matrix(m, a + b);
        CHECK((pab - pa * pb).cwiseAbs().maxCoeff() < 1e-9);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(pa.row(i).sum() - 1.0) < 1e-10);
        }
        CHECK(pa.minCoeff() >= 0.0);
        CHECK(pa.maxCoeff() <= 1.0);
    }
}

TEST_CASE("stationary distribution") {
    const Eigen::VectorXd sym = pins::stationary_distribution(two_state(0.25, 0.25));
    CHECK(sym(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sym(1) == doctest::Approx(0.5).epsilon(1e-14));

    const Eigen::VectorXd asym = pins::stationary_distribution(two_state(1, 3));
    CHECK(asym(0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(asym(1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK((asym.transpose() * two_state(1, 3)).cwiseAbs().maxCoeff() < 1e-10);

    const auto m = reference_model();
    const Eigen::MatrixXd far = pins::transition_matrix(m, 1000.0);
    const Eigen::VectorXd pi = pins::stationary_distribution(m);
    for (int i = 0; i < 2; ++i) {
        CHECK((far.row(i).transpose() - pi).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("stationary distribution rejects reducible generators") {
    CHECK_THROWS_AS(pins::stationary_distribution(Eigen::MatrixXd::Zero(2, 2)),
                    pins::NoUniqueStationary);
    // state 1 is absorbing
    CHECK_THROWS_AS(pins::stationary_distribution(two_state(1.0, 0.0)), pins::NoUniqueStationary);
    CHECK_THROWS_AS(pins::RegimeModel(two_state(1.0, 0.0), Eigen::Vector2d(0, 0),
                                      Eigen::Vector2d(0.1, 0.1)),
                    pins::NoUniqueStationary);
}

TEST_CASE("cumulative-threshold sampling") {
    const auto m = reference_model();
    const double dt = 1.0 / 260.0;
    const Eigen::MatrixXd p = pins::transition_matrix(m, dt);
    const std::vector<double> stay{0.5};
    const std::vector<double> jump{0.9995};
    CHECK(pins::sample_regime_path(p, dt, stay, 0).states == std::vector<int>{0, 0});
    CHECK(pins::sample_regime_path(p, dt, jump, 0).states == std::vector<int>{0, 1});
    // from state 2 the first cumulative entry is the jump probability
    CHECK(pins::sample_regime_path(p, dt, stay, 1).states == std::vector<int>{1, 1});
    CHECK(pins::sample_regime_path(p, dt, std::vector<double>{0.0005}, 1).states ==
          std::vector<int>{1, 0});

    const pins::RegimeModel frozen(Eigen::MatrixXd::Zero(3, 3), Eigen::Vector3d::Zero(),
                                   Eigen::Vector3d::Constant(0.1), Eigen::Vector3d(0, 1, 0));
    const std::vector<double> us{0.01, 0.5, 0.99, 0.999999};
    const auto path = pins::sample_regime_path(frozen, us.size(), dt, us, 1);
    CHECK(path.states == std::vector<int>{1, 1, 1, 1, 1});
    CHECK(path.dt == dt);
}

TEST_CASE("draw_state boundaries") {
    const Eigen::RowVector3d probs(0.2, 0.3, 0.5);
    CHECK(pins::draw_state(probs, 0.0) == 0);
    CHECK(pins::draw_state(probs, 0.2) == 1);  // strict inequality
    CHECK(pins::draw_state(probs, 0.4999) == 1);
    CHECK(pins::draw_state(probs, 0.5) == 2);
    CHECK(pins::draw_state(probs, 1.0) == 2);
}

TEST_CASE("empirical occupancy matches the stationary law") {
    const pins::RegimeModel m(two_state(10.0, 30.0), Eigen::Vector2d(0, 0), Eigen::Vector2d(0.1, 0.1));
    const double dt = 1.0 / 260.0;
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> us(100000);
    for (double& x : us) x = u(gen);
    const auto path = pins::sample_regime_path(m, us.size(), dt, us, 0);
    REQUIRE(path.states.size() == us.size() + 1);
    double in_first = 0.0;
    for (int s : path.states) in_first += (s == 0);
    in_first /= static_cast<double>(path.states.size());
    CHECK(std::abs(in_first - 0.75) < 0.02);
}
