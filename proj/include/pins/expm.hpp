#pragma once

// Matrix exponential by scaling and squaring with diagonal Padé approximants
// (degrees 3, 5, 7, 9, 13), following Higham's 2005 selection of degree by
// the 1-norm. Works for real and complex dense matrices of any size.

#include <Eigen/Dense>
#include <Eigen/LU>

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

#include "pins/errors.hpp"

namespace pins {

namespace detail {

template <typename Matrix>
typename Matrix::RealScalar one_norm(const Matrix& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

template <typename Matrix, std::size_t N>
void pade_low(const Matrix& a, const std::array<double, N>& b, Matrix& u, Matrix& v) {
    using Scalar = typename Matrix::Scalar;
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    Matrix power = ident;
    Matrix odd = Scalar(b[1]) * ident;
    Matrix even = Scalar(b[0]) * ident;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        even += Scalar(b[k]) * power;
        odd += Scalar(b[k + 1]) * power;
    }
    u = a * odd;
    v = even;
}

template <typename Matrix>
void pade13(const Matrix& a, Matrix& u, Matrix& v) {
    using Scalar = typename Matrix::Scalar;
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    const auto n = a.rows();
    const Matrix ident = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix inner_u = Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2;
    const Matrix inner_v = Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2;
    u = a * (a6 * inner_u + Scalar(b[7]) * a6 + Scalar(b[5]) * a4 + Scalar(b[3]) * a2 +
             Scalar(b[1]) * ident);
    v = a6 * inner_v + Scalar(b[6]) * a6 + Scalar(b[4]) * a4 + Scalar(b[2]) * a2 +
        Scalar(b[0]) * ident;
}

}  // namespace detail

/// exp(A) for a square dense matrix. Throws NumericFailure on non-finite
/// input or output.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
expm(const Eigen::MatrixBase<Derived>& input) {
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Real = typename Derived::RealScalar;

    if (input.rows() != input.cols()) {
        throw InvalidModel("expm: matrix must be square");
    }
    if (!input.allFinite()) {
        throw NumericFailure("expm: non-finite matrix entry");
    }

    Matrix a = input;
    const Real norm = detail::one_norm(a);
    Matrix u, v;
    int squarings = 0;

    if (norm <= Real(1.495585217958292e-2)) {
        detail::pade_low(a, std::array<double, 4>{120.0, 60.0, 12.0, 1.0}, u, v);
    } else if (norm <= Real(2.539398330063230e-1)) {
        detail::pade_low(a, std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0},
                         u, v);
    } else if (norm <= Real(9.504178996162932e-1)) {
        detail::pade_low(a,
                         std::array<double, 8>{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0, 1512.0, 56.0, 1.0},
                         u, v);
    } else if (norm <= Real(2.097847961257068)) {
        detail::pade_low(a,
                         std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0,
                                                302702400.0, 30270240.0, 2162160.0, 110880.0,
                                                3960.0, 90.0, 1.0},
                         u, v);
    } else {
        constexpr Real theta13 = Real(5.371920351148152);
        if (norm > theta13) {
            squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
            a /= static_cast<Real>(std::ldexp(1.0, squarings));
        }
        detail::pade13(a, u, v);
    }

    Matrix result = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) {
        result = result * result;
    }
    if (!result.allFinite()) {
        throw NumericFailure("expm: result overflowed");
    }
    return result;
}

}  // namespace pins
