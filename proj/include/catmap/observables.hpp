#ifndef CATMAP_OBSERVABLES_HPP
#define CATMAP_OBSERVABLES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "catmap/errors.hpp"
#include "catmap/hilbert.hpp"
#include "catmap/linalg.hpp"
#include "catmap/propagator.hpp"
#include "catmap/quantize.hpp"
#include "catmap/stats.hpp"

namespace catmap {

/// V_N(f,g)(l) = <T_{l/N} f, g>
inline Complex fourier_wigner(const StateVector& f, const StateVector& g, std::int64_t l1,
                              std::int64_t l2) {
    if (!(f.spec == g.spec)) throw DimensionMismatch("fourier_wigner: specs differ");
    return inner_product(translation_apply(l1, l2, f), g);
}

struct WignerData {
    std::map<std::pair<std::int64_t, std::int64_t>, Complex> coefficients;
};

inline WignerData wigner_data(const StateVector& phi, std::int64_t L_max) {
    WignerData w;
    for (std::int64_t l1 = -L_max; l1 <= L_max; ++l1)
        for (std::int64_t l2 = -L_max; l2 <= L_max; ++l2)
            w.coefficients[{l1, l2}] = fourier_wigner(phi, phi, l1, l2);
    return w;
}

/// <Op_N(a) phi, phi> assembled from the Fourier-Wigner table.
inline Complex matrix_element(const TorusSymbol& a, const StateVector& phi) {
    Complex acc = 0;
    for (const auto& [l, c] : a.coeffs) acc += c * fourier_wigner(phi, phi, l.first, l.second);
    return acc;
}

/// H_N mass fraction of phi on indices ceil(a1 N) .. floor(a2 N).
inline double window_mass(const StateVector& phi, double alpha1, double alpha2) {
    if (!(alpha1 >= 0 && alpha1 < alpha2 && alpha2 <= 1)) throw BadWindow("need 0 <= a1 < a2 <= 1");
    if (std::abs(phi.norm() - 1.0) > 1e-9) throw NotNormalized("window_mass needs a unit state");
    const std::int64_t N = phi.spec.N;
    const std::int64_t lo = static_cast<std::int64_t>(std::ceil(alpha1 * static_cast<double>(N)));
    const std::int64_t hi =
        std::min<std::int64_t>(N - 1, static_cast<std::int64_t>(std::floor(alpha2 * static_cast<double>(N))));
    double mass = 0;
    for (std::int64_t k = lo; k <= hi; ++k) mass += std::norm(phi.amplitudes(k));
    return mass / static_cast<double>(N);
}

struct DelocRow {
    std::int64_t N = 0;
    double min_mass = 0;
    double c1_proxy = 0;  // 1 / min_j ||Op(a) phi_j||_{H_N}
};

/// Per-N minimum window mass over a full eigenbasis, plus the
/// empirical lower-bound constant for a supplied bump symbol.
inline std::vector<DelocRow> deloc_scan(const HyperbolicMap& map, double alpha1, double alpha2,
                                        const std::vector<std::int64_t>& N_list,
                                        const TorusSymbol& bump, bool randomized = false,
                                        std::uint64_t seed = 0) {
    std::vector<DelocRow> rows;
    for (const std::int64_t N : N_list) {
        const HilbertSpec spec(N);
        const QuantumCatMap qcm = build_cat_matrix(map, spec);
        const SpectralData sd = eigendecompose(qcm, randomized, seed);
        DelocRow row;
        row.N = N;
        row.min_mass = 1.0;
        for (std::int64_t j = 0; j < N; ++j)
            row.min_mass = std::min(row.min_mass, window_mass(sd.state(j), alpha1, alpha2));
        const MatrixXcd applied = op_matrix(bump, spec) * sd.eigenvectors;
        double min_norm = std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j < N; ++j) min_norm = std::min(min_norm, applied.col(j).norm());
        row.c1_proxy = 1.0 / min_norm;  // Euclidean = H_N norm for unit columns
        rows.push_back(row);
    }
    return rows;
}

/// (1/N) sum_j |<Op(a) phi_j, phi_j> - hat_a(0)|^2 over a full eigenbasis.
inline double qe_variance(const HyperbolicMap& map, const TorusSymbol& a, const HilbertSpec& spec) {
    const QuantumCatMap qcm = build_cat_matrix(map, spec);
    const SpectralData sd = eigendecompose(qcm);
    const auto it = a.coeffs.find({0, 0});
    const Complex mean = it == a.coeffs.end() ? Complex(0) : it->second;
    const MatrixXcd applied = op_matrix(a, spec) * sd.eigenvectors;
    double acc = 0;
    for (std::int64_t j = 0; j < spec.N; ++j) {
        const Complex elem = sd.eigenvectors.col(j).dot(applied.col(j));
        acc += std::norm(elem - mean);
    }
    return acc / static_cast<double>(spec.N);
}

/// Husimi density: squared overlaps with periodized Gaussian coherent
/// states on a uniform grid, normalized to unit Riemann sum.
inline Eigen::MatrixXd husimi_grid(const StateVector& phi, std::int64_t resolution) {
    if (resolution < 16) throw BadWindow("husimi resolution must be >= 16");
    const std::int64_t N = phi.spec.N;
    Eigen::MatrixXd grid(resolution, resolution);
    VectorXcd cs(N);
    for (std::int64_t i = 0; i < resolution; ++i) {
        const double y = static_cast<double>(i) / resolution;
        for (std::int64_t j = 0; j < resolution; ++j) {
            const double eta = static_cast<double>(j) / resolution;
            for (std::int64_t k = 0; k < N; ++k) {
                Complex v = 0;
                for (int n = -3; n <= 3; ++n) {
                    const double x = static_cast<double>(k) / N + n - y;
                    v += std::exp(-std::numbers::pi * N * x * x) *
                         std::polar(1.0, 2.0 * std::numbers::pi * N * eta *
                                             (static_cast<double>(k) / N + n));
                }
                cs(k) = v;
            }
            const double nrm = cs.norm() / std::sqrt(static_cast<double>(N));
            StateVector coherent{phi.spec, cs / nrm};
            grid(i, j) = std::norm(inner_product(coherent, phi));
        }
    }
    const double total = grid.sum() / static_cast<double>(resolution * resolution);
    if (total > 0) grid /= total;
    return grid;
}

} // namespace catmap

#endif
