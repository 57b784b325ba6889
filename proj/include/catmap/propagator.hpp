#ifndef CATMAP_PROPAGATOR_HPP
#define CATMAP_PROPAGATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "catmap/classical.hpp"
#include "catmap/errors.hpp"
#include "catmap/hilbert.hpp"
#include "catmap/linalg.hpp"
#include "catmap/quantize.hpp"

namespace catmap {

inline std::int64_t mod_inverse(std::int64_t a, std::int64_t n) {
    auto [g, x, y] = ext_gcd(((a % n) + n) % n, n);
    (void)y;
    if (g != 1) throw UnsupportedN("no modular inverse");
    return ((x % n) + n) % n;
}

struct QuantumCatMap {
    HilbertSpec spec{1};
    HyperbolicMap map;
    MatrixXcd matrix;
    double unitarity = 0;  // measured ||MM* - I||_inf
    // phase convention: quadratic-exponential kernel, global phase
    // rotated so arg(M[0,0]) lies in [0, 2pi/N)
    std::string phase_convention = "quadratic-kernel/arg00-in-[0,2pi/N)";
};

/// M[j,k] = (sigma/sqrt(N)) exp(2 pi i inv(2b,N) (a k^2 - 2jk + d j^2) / N).
/// For the [[2,1],[3,2]] map and odd N this is the classical kernel
/// (1/sqrt(N)) exp(2 pi i (k^2 - kj + j^2)/N).
inline QuantumCatMap build_cat_matrix(const HyperbolicMap& map, const HilbertSpec& spec,
                                      bool verify = true) {
    const std::int64_t N = spec.N;
    const std::int64_t b = map.entries.b;
    if (b == 0) throw UnsupportedN("kernel needs a12 != 0");
    if (std::gcd(std::llabs(2 * b), N) != 1) throw UnsupportedN("gcd(2*a12, N) must be 1");
    const std::int64_t u = mod_inverse(2 * b, N);
    const std::int64_t a = ((map.entries.a % N) + N) % N;
    const std::int64_t d = ((map.entries.d % N) + N) % N;

    QuantumCatMap out;
    out.spec = spec;
    out.map = map;
    out.matrix.resize(N, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<std::int64_t> sq(static_cast<std::size_t>(N));
    for (std::int64_t k = 0; k < N; ++k) sq[static_cast<std::size_t>(k)] = (k * k) % N;
    for (std::int64_t j = 0; j < N; ++j) {
        const std::int64_t dj2 = (d * sq[static_cast<std::size_t>(j)]) % N;
        for (std::int64_t k = 0; k < N; ++k) {
            std::int64_t q = (a * sq[static_cast<std::size_t>(k)] - 2 * j * k % N + dj2) % N;
            q = ((u * ((q % N) + N)) % N);
            out.matrix(j, k) =
                scale * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(q) /
                                            static_cast<double>(N));
        }
    }
    double arg00 = std::arg(out.matrix(0, 0));
    const double sector = 2.0 * std::numbers::pi / static_cast<double>(N);
    const double shift = sector * std::floor(arg00 / sector);
    if (shift != 0.0) out.matrix *= std::polar(1.0, -shift);

    if (verify) {
        out.unitarity = unitarity_residual(out.matrix);
        if (out.unitarity >= 1e-8) throw UnitarityFailure("kernel failed the unitarity check");
    }
    return out;
}

/// ||M^{-n} Op(a) M^n - Op(a o gamma^n)|| (largest singular value).
inline double egorov_defect(const QuantumCatMap& qcm, const TorusSymbol& a, std::int64_t power = 1) {
    MatrixXcd mp = MatrixXcd::Identity(qcm.spec.N, qcm.spec.N);
    for (std::int64_t i = 0; i < power; ++i) mp = qcm.matrix * mp;
    const MatrixXcd lhs = mp.adjoint() * op_matrix(a, qcm.spec) * mp;
    const MatrixXcd rhs = op_matrix(compose_with_map(a, qcm.map, power), qcm.spec);
    return operator_norm(lhs - rhs);
}

/// Frobenius-norm variant of the same defect; an upper bound on the
/// operator norm, cheap enough for sweeps. Uses the unitarily
/// equivalent form ||Op(a) M^n - M^n Op(a o gamma^n)||_F.
inline double egorov_defect_frob(const MatrixXcd& m_pow, const TorusSymbol& a,
                                 const TorusSymbol& a_comp, const HilbertSpec& spec) {
    const MatrixXcd diff = op_matrix(a, spec) * m_pow - m_pow * op_matrix(a_comp, spec);
    return frobenius_norm(diff);
}

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

struct SpectralData {
    HilbertSpec spec{1};
    VectorXcd eigenvalues;
    MatrixXcd eigenvectors;  // columns, orthonormal in the Euclidean metric
    std::vector<std::pair<std::int64_t, std::int64_t>> clusters;  // (start, size)

    /// Eigenvector j as a unit H_N state (amplitudes scaled by sqrt(N)).
    StateVector state(std::int64_t j) const {
        return {spec, eigenvectors.col(j) * std::sqrt(static_cast<double>(spec.N))};
    }
};

namespace detail {

/// Fixes each column phase: largest-modulus entry real positive.
inline void canonical_phases(MatrixXcd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index imax = 0;
        v.col(c).cwiseAbs().maxCoeff(&imax);
        const Complex z = v(imax, c);
        if (std::abs(z) > 0) v.col(c) *= std::conj(z) / std::abs(z);
    }
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix.
inline MatrixXcd random_unitary(std::int64_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd z(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(z);
    MatrixXcd q = qr.householderQ();
    return q;
}

} // namespace detail

/// Unitary diagonalization via a complex Schur form (exactly diagonal
/// up to roundoff for normal matrices). Eigenpairs are sorted by
/// eigenvalue argument; within each degenerate cluster (gap < 1e-8)
/// the basis is rotated to diagonalize the position-window mass on
/// [0, 1/2), a deterministic tie-break. With randomize set, clusters
/// are instead rotated by a seeded random unitary.
inline SpectralData eigendecompose(const QuantumCatMap& qcm, bool randomize = false,
                                   std::uint64_t seed = 0) {
    const std::int64_t N = qcm.spec.N;
    Eigen::ComplexSchur<MatrixXcd> schur(qcm.matrix, true);
    if (schur.info() != Eigen::Success) throw ConvergenceFailure("Schur iteration failed");

    SpectralData sd;
    sd.spec = qcm.spec;
    VectorXcd vals = schur.matrixT().diagonal();
    MatrixXcd vecs = schur.matrixU();

    // Schur leaves a normal matrix with off-diagonal at roundoff level;
    // anything larger means the input was not numerically unitary.
    MatrixXcd t = schur.matrixT();
    t.diagonal().setZero();
    if (max_abs(t) > 1e-9) throw ConvergenceFailure("Schur form far from diagonal");

    std::vector<std::int64_t> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    auto arg2pi = [](const Complex& z) {
        double a = std::arg(z);
        if (a < 0) a += 2.0 * std::numbers::pi;
        return a;
    };
    std::sort(order.begin(), order.end(), [&](std::int64_t i, std::int64_t j) {
        return arg2pi(vals(i)) < arg2pi(vals(j));
    });

    sd.eigenvalues.resize(N);
    sd.eigenvectors.resize(N, N);
    for (std::int64_t i = 0; i < N; ++i) {
        sd.eigenvalues(i) = vals(order[static_cast<std::size_t>(i)]);
        sd.eigenvectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]);
    }

    // degeneracy clusters at gap 1e-8 (argument is sorted; also merge
    // across the 0/2pi wrap)
    std::int64_t start = 0;
    for (std::int64_t i = 1; i <= N; ++i) {
        const bool split =
            i == N || std::abs(sd.eigenvalues(i) - sd.eigenvalues(i - 1)) >= 1e-8;
        if (split) {
            sd.clusters.push_back({start, i - start});
            start = i;
        }
    }
    if (sd.clusters.size() >= 2 &&
        std::abs(sd.eigenvalues(0) - sd.eigenvalues(N - 1)) < 1e-8) {
        // merge the wrap-around cluster; a negative start indexes
        // modulo N in the rotation loop below
        const auto tail = sd.clusters.back();
        sd.clusters.pop_back();
        sd.clusters.front() = {tail.first - N, tail.second + sd.clusters.front().second};
    }

    std::mt19937_64 rng(seed);
    for (const auto& [cs, csize] : sd.clusters) {
        if (csize < 2) continue;
        std::vector<std::int64_t> idx;
        for (std::int64_t k = 0; k < csize; ++k) idx.push_back(((cs + k) % N + N) % N);
        MatrixXcd sub(N, csize);
        for (std::int64_t k = 0; k < csize; ++k) sub.col(k) = sd.eigenvectors.col(idx[static_cast<std::size_t>(k)]);
        MatrixXcd rot;
        if (randomize) {
            rot = detail::random_unitary(csize, rng);
        } else {
            // restricted window-mass operator for the window [0, 1/2)
            const std::int64_t half = (N + 1) / 2;
            const MatrixXcd top = sub.topRows(half);
            MatrixXcd w = top.adjoint() * top;
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(w);
            if (es.info() != Eigen::Success) throw ConvergenceFailure("tie-break eigensolver");
            rot = es.eigenvectors();
        }
        sub = sub * rot;
        for (std::int64_t k = 0; k < csize; ++k) sd.eigenvectors.col(idx[static_cast<std::size_t>(k)]) = sub.col(k);
    }
    detail::canonical_phases(sd.eigenvectors);

    // polish eigenvalues with Rayleigh quotients on the final basis
    const MatrixXcd mv = qcm.matrix * sd.eigenvectors;
    for (std::int64_t i = 0; i < N; ++i)
        sd.eigenvalues(i) = sd.eigenvectors.col(i).dot(mv.col(i));
    return sd;
}

/// Least P <= P_max with M^P = zeta I (|zeta| = 1), residual <= tol.
inline std::int64_t quantum_period(const QuantumCatMap& qcm, std::int64_t P_max,
                                   double tol = 1e-8) {
    const std::int64_t N = qcm.spec.N;
    MatrixXcd p = MatrixXcd::Identity(N, N);
    for (std::int64_t P = 1; P <= P_max; ++P) {
        p = qcm.matrix * p;
        const Complex zeta = p(0, 0);
        if (std::abs(std::abs(zeta) - 1.0) > tol) continue;
        MatrixXcd diff = p;
        diff.diagonal().array() -= zeta;
        if (max_abs(diff) <= tol) return P;
    }
    throw NotFound("quantum_period: P_max exceeded");
}

// ---------------------------------------------------------------------------
// Binary dump: magic "QCM1", u64 N, row-major interleaved f64 re/im
// ---------------------------------------------------------------------------

inline void dump_matrix(const MatrixXcd& m, std::ostream& os) {
    os.write("QCM1", 4);
    const std::uint64_t n = static_cast<std::uint64_t>(m.rows());
    os.write(reinterpret_cast<const char*>(&n), 8);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double re = m(i, j).real();
            const double im = m(i, j).imag();
            os.write(reinterpret_cast<const char*>(&re), 8);
            os.write(reinterpret_cast<const char*>(&im), 8);
        }
    }
}

inline MatrixXcd load_matrix(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "QCM1") throw DimensionMismatch("bad matrix magic");
    std::uint64_t n = 0;
    is.read(reinterpret_cast<char*>(&n), 8);
    if (!is || n == 0) throw DimensionMismatch("bad matrix header");
    MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double re = 0, im = 0;
            is.read(reinterpret_cast<char*>(&re), 8);
            is.read(reinterpret_cast<char*>(&im), 8);
            m(i, j) = Complex(re, im);
        }
    }
    if (!is) throw DimensionMismatch("truncated matrix payload");
    return m;
}

} // namespace catmap

#endif
