#ifndef CATMAP_LINALG_HPP
#define CATMAP_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

namespace catmap {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using Vector2d = Eigen::Vector2d;
using Matrix2d = Eigen::Matrix2d;

/// Largest singular value (operator norm on C^N with the Euclidean
/// metric; the H_N norm rescaling cancels for operators). Computed as
/// the square root of the top eigenvalue of the Gram matrix, which is
/// accurate to machine precision for the *largest* singular value and
/// sidesteps BDCSVD's deflation bugs on matrices with clustered
/// spectra.
inline double operator_norm(const MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    const MatrixXcd g =
        m.cols() > m.rows() ? MatrixXcd(m * m.adjoint()) : MatrixXcd(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

/// Frobenius norm; an upper bound on the operator norm, used as a
/// sound certificate when asserting that a defect matrix is small.
inline double frobenius_norm(const MatrixXcd& m) { return m.norm(); }

/// max_{j,k} |(M M^* - I)_{jk}| computed at half the gemm cost.
inline double unitarity_residual(const MatrixXcd& m) {
    const Eigen::Index n = m.rows();
    MatrixXcd g = MatrixXcd::Zero(n, n);
    g.selfadjointView<Eigen::Lower>().rankUpdate(m, 1.0);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i) {
            const Complex expect = (i == j) ? Complex(1, 0) : Complex(0, 0);
            worst = std::max(worst, std::abs(g(i, j) - expect));
        }
    }
    return worst;
}

/// Entrywise max modulus.
inline double max_abs(const MatrixXcd& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

} // namespace catmap

#endif
