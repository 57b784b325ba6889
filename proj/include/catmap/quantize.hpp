#ifndef CATMAP_QUANTIZE_HPP
#define CATMAP_QUANTIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <json.hpp>

#include "catmap/classical.hpp"
#include "catmap/errors.hpp"
#include "catmap/hilbert.hpp"
#include "catmap/linalg.hpp"

namespace catmap {

// ---------------------------------------------------------------------------
// TorusSymbol: a(y,eta) = sum_l hat_a(l) e^{2 pi i (l2 y - l1 eta)}
// ---------------------------------------------------------------------------

struct TorusSymbol {
    using Freq = std::pair<std::int64_t, std::int64_t>;  // (l1, l2)
    std::map<Freq, Complex> coeffs;

    static TorusSymbol constant(double c) {
        TorusSymbol s;
        if (c != 0.0) s.coeffs[{0, 0}] = c;
        return s;
    }

    static TorusSymbol mode(std::int64_t l1, std::int64_t l2, Complex c) {
        TorusSymbol s;
        s.coeffs[{l1, l2}] = c;
        return s;
    }

    /// cos(2 pi (l2 y - l1 eta)) with amplitude amp
    static TorusSymbol cosine(std::int64_t l1, std::int64_t l2, double amp = 1.0) {
        TorusSymbol s;
        s.coeffs[{l1, l2}] += amp / 2.0;
        s.coeffs[{-l1, -l2}] += amp / 2.0;
        return s;
    }

    std::int64_t max_freq() const {
        std::int64_t m = 0;
        for (const auto& [l, c] : coeffs)
            m = std::max({m, std::abs(l.first), std::abs(l.second)});
        return m;
    }

    Complex evaluate_complex(double y, double eta) const {
        Complex acc = 0;
        for (const auto& [l, c] : coeffs) {
            const double ph = 2.0 * std::numbers::pi *
                              (static_cast<double>(l.second) * y - static_cast<double>(l.first) * eta);
            acc += c * std::polar(1.0, ph);
        }
        return acc;
    }

    double evaluate(double y, double eta) const { return evaluate_complex(y, eta).real(); }

    /// max |hat_a(-l) - conj(hat_a(l))|
    double reality_defect() const {
        double worst = 0;
        for (const auto& [l, c] : coeffs) {
            const auto it = coeffs.find({-l.first, -l.second});
            const Complex mirror = it == coeffs.end() ? Complex(0) : it->second;
            worst = std::max(worst, std::abs(mirror - std::conj(c)));
        }
        return worst;
    }

    TorusSymbol& operator+=(const TorusSymbol& o) {
        for (const auto& [l, c] : o.coeffs) coeffs[l] += c;
        return *this;
    }

    TorusSymbol& operator*=(double s) {
        for (auto& [l, c] : coeffs) c *= s;
        return *this;
    }
};

inline TorusSymbol operator+(TorusSymbol a, const TorusSymbol& b) { return a += b; }
inline TorusSymbol operator*(double s, TorusSymbol a) { return a *= s; }

// ---------------------------------------------------------------------------
// Grid transforms
// ---------------------------------------------------------------------------

namespace detail {

/// In-place unnormalized 2-D DFT. Forward uses e^{-2 pi i}; inverse
/// uses e^{+2 pi i} (no 1/M^2).
inline void dft2d(MatrixXcd& g, bool inverse) {
    Eigen::FFT<double> fft;
    const Eigen::Index M = g.rows();
    std::vector<Complex> in(static_cast<std::size_t>(M)), out(static_cast<std::size_t>(M));
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        for (Eigen::Index r = 0; r < M; ++r) in[static_cast<std::size_t>(r)] = g(r, c);
        if (inverse) {
            fft.inv(out, in);
            for (Eigen::Index r = 0; r < M; ++r)
                g(r, c) = out[static_cast<std::size_t>(r)] * static_cast<double>(M);
        } else {
            fft.fwd(out, in);
            for (Eigen::Index r = 0; r < M; ++r) g(r, c) = out[static_cast<std::size_t>(r)];
        }
    }
    const Eigen::Index Mc = g.cols();
    in.resize(static_cast<std::size_t>(Mc));
    out.resize(static_cast<std::size_t>(Mc));
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < Mc; ++c) in[static_cast<std::size_t>(c)] = g(r, c);
        if (inverse) {
            fft.inv(out, in);
            for (Eigen::Index c = 0; c < Mc; ++c)
                g(r, c) = out[static_cast<std::size_t>(c)] * static_cast<double>(Mc);
        } else {
            fft.fwd(out, in);
            for (Eigen::Index c = 0; c < Mc; ++c) g(r, c) = out[static_cast<std::size_t>(c)];
        }
    }
}

} // namespace detail

inline int default_l_max() { return 48; }

/// Fourier table from samples f(i,j) = f(y = i/M, eta = j/M), truncated
/// to ||l||_inf <= L_max and symmetrized to a real symbol.
inline TorusSymbol sample_symbol(const Eigen::MatrixXd& samples, std::int64_t L_max) {
    const std::int64_t M = samples.rows();
    if (samples.cols() != M) throw GridTooCoarse("sample grid must be square");
    if (M < 2 * L_max + 2) throw GridTooCoarse("grid must satisfy M >= 2*L_max + 2");
    MatrixXcd g = samples.cast<Complex>();
    detail::dft2d(g, false);
    const double scale = 1.0 / (static_cast<double>(M) * static_cast<double>(M));
    TorusSymbol sym;
    for (std::int64_t l1 = -L_max; l1 <= L_max; ++l1) {
        for (std::int64_t l2 = -L_max; l2 <= L_max; ++l2) {
            const std::int64_t p = ((l2 % M) + M) % M;
            const std::int64_t q = (((-l1) % M) + M) % M;
            const Complex c = g(p, q) * scale;
            if (std::abs(c) > 1e-300) sym.coeffs[{l1, l2}] = c;
        }
    }
    // enforce hat_a(-l) = conj(hat_a(l))
    TorusSymbol out;
    for (const auto& [l, c] : sym.coeffs) {
        const auto it = sym.coeffs.find({-l.first, -l.second});
        const Complex mirror = it == sym.coeffs.end() ? Complex(0) : it->second;
        out.coeffs[l] = (c + std::conj(mirror)) / 2.0;
    }
    return out;
}

/// Samples the symbol on an M x M grid via zero-padded inverse DFT;
/// returns a(i/M, j/M). M must resolve every stored frequency.
inline Eigen::MatrixXd grid_evaluate(const TorusSymbol& a, std::int64_t M) {
    if (M < 2 * a.max_freq() + 2) throw GridTooCoarse("evaluation grid aliases the symbol");
    MatrixXcd g = MatrixXcd::Zero(M, M);
    for (const auto& [l, c] : a.coeffs) {
        const std::int64_t p = ((l.second % M) + M) % M;
        const std::int64_t q = (((-l.first) % M) + M) % M;
        g(p, q) += c;
    }
    detail::dft2d(g, true);
    return g.real();
}

/// Op_N(a) = sum_l hat_a(l) T_{l/N}
inline MatrixXcd op_matrix(const TorusSymbol& a, const HilbertSpec& spec) {
    MatrixXcd m = MatrixXcd::Zero(spec.N, spec.N);
    for (const auto& [l, c] : a.coeffs) add_scaled_translation(m, l.first, l.second, c, spec);
    return m;
}

/// a compose gamma^power: exact frequency relabeling l -> gamma^{-power} l.
inline TorusSymbol compose_with_map(const TorusSymbol& a, const HyperbolicMap& map,
                                    std::int64_t power, std::int64_t freq_bound = 1000000) {
    const IntMat2 rel = int_mat_pow(map.entries, -power);
    TorusSymbol out;
    for (const auto& [l, c] : a.coeffs) {
        const auto nl = rel.apply(l.first, l.second);
        if (std::llabs(nl[0]) > freq_bound || std::llabs(nl[1]) > freq_bound)
            throw CutoffOverflow("relabeled frequency exceeds bound");
        out.coeffs[{nl[0], nl[1]}] += c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Partition of unity
// ---------------------------------------------------------------------------

struct Ball {
    Vector2d center;
    double radius = 0;
};

struct PartitionPair {
    TorusSymbol a1, a2;
    Ball K1, K2;
};

namespace detail {

inline double bump_half(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }

/// C-infinity step: 0 for x <= 0, 1 for x >= 1.
inline double smoothstep(double x) {
    const double f = bump_half(x);
    return f / (f + bump_half(1.0 - x));
}

} // namespace detail

/// a1 is a radial plateau around K2: 1 on K2, 0 outside supp_bound and
/// in particular on K1; a2 = 1 - a1 in exact coefficient arithmetic.
inline PartitionPair build_partition(const Ball& K1, const Ball& K2, const Ball& supp_bound,
                                     std::int64_t L_max = 48) {
    if (torus_dist(K1.center, K2.center) <= K1.radius + K2.radius)
        throw OverlappingRegions("K1 and K2 closures intersect");
    const double slack = supp_bound.radius - torus_dist(K2.center, supp_bound.center);
    if (slack <= K2.radius)
        throw OverlappingRegions("K2 not contained in supp_bound");
    if (torus_dist(K1.center, supp_bound.center) < K1.radius + supp_bound.radius)
        throw OverlappingRegions("K1 intersects supp_bound");
    const double r_in = K2.radius;
    // B(K2.center, slack) is the largest K2-centered ball inside supp_bound
    const double r_out = slack;
    const std::int64_t M = std::max<std::int64_t>(4 * L_max + 4, 256);
    Eigen::MatrixXd f(M, M);
    for (std::int64_t i = 0; i < M; ++i) {
        for (std::int64_t j = 0; j < M; ++j) {
            const double d = torus_dist({static_cast<double>(i) / M, static_cast<double>(j) / M},
                                        K2.center);
            f(i, j) = 1.0 - detail::smoothstep((d - r_in) / (r_out - r_in));
        }
    }
    PartitionPair p;
    p.K1 = K1;
    p.K2 = K2;
    p.a1 = sample_symbol(f, L_max);
    p.a2 = TorusSymbol::constant(1.0);
    for (const auto& [l, c] : p.a1.coeffs) p.a2.coeffs[l] -= c;
    return p;
}

// ---------------------------------------------------------------------------
// Moyal and Garding probes
// ---------------------------------------------------------------------------

/// De-aliased pointwise product symbol.
inline TorusSymbol symbol_product(const TorusSymbol& a, const TorusSymbol& b) {
    const std::int64_t L = a.max_freq() + b.max_freq();
    const std::int64_t M = std::max<std::int64_t>(2 * L + 2, 8);
    const Eigen::MatrixXd prod =
        grid_evaluate(a, M).cwiseProduct(grid_evaluate(b, M));
    return sample_symbol(prod, L);
}

/// ||Op(a)Op(b) - Op(ab)||
inline double moyal_defect(const TorusSymbol& a, const TorusSymbol& b, const HilbertSpec& spec) {
    const MatrixXcd lhs = op_matrix(a, spec) * op_matrix(b, spec);
    const MatrixXcd rhs = op_matrix(symbol_product(a, b), spec);
    return operator_norm(lhs - rhs);
}

/// Minimum eigenvalue of the Hermitian part of Op_N(a).
inline double garding_floor(const TorusSymbol& a, const HilbertSpec& spec) {
    const MatrixXcd op = op_matrix(a, spec);
    const MatrixXcd herm = (op + op.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("garding_floor eigensolver");
    return es.eigenvalues()(0);
}

struct GrowthReport {
    double unstable_norm = 0;
    double stable_norm = 0;
    double unstable_ratio = 0;  // unstable_norm / lambda_u^t relative to t=0 norm
};

/// Finite-difference sup-norms of directional derivatives of a o gamma^t
/// along the unstable and stable eigendirections.
inline GrowthReport derivative_growth_probe(const TorusSymbol& a, const HyperbolicMap& map,
                                            std::int64_t t, std::int64_t grid = 256,
                                            double fd_step = 1e-4) {
    const TorusSymbol comp = compose_with_map(a, map, t);
    const Vector2d vu = map.v_u.normalized();
    const Vector2d vs = map.v_s.normalized();
    GrowthReport rep;
    double base = 0;
    for (std::int64_t i = 0; i < grid; ++i) {
        for (std::int64_t j = 0; j < grid; ++j) {
            const double y = static_cast<double>(i) / grid;
            const double e = static_cast<double>(j) / grid;
            const double du = (comp.evaluate(y + fd_step * vu.x(), e + fd_step * vu.y()) -
                               comp.evaluate(y - fd_step * vu.x(), e - fd_step * vu.y())) /
                              (2 * fd_step);
            const double ds = (comp.evaluate(y + fd_step * vs.x(), e + fd_step * vs.y()) -
                               comp.evaluate(y - fd_step * vs.x(), e - fd_step * vs.y())) /
                              (2 * fd_step);
            rep.unstable_norm = std::max(rep.unstable_norm, std::abs(du));
            rep.stable_norm = std::max(rep.stable_norm, std::abs(ds));
            const double d0u = (a.evaluate(y + fd_step * vu.x(), e + fd_step * vu.y()) -
                                a.evaluate(y - fd_step * vu.x(), e - fd_step * vu.y())) /
                               (2 * fd_step);
            base = std::max(base, std::abs(d0u));
        }
    }
    const double lam_t = std::pow(std::abs(map.lambda_u), static_cast<double>(t));
    rep.unstable_ratio = base > 0 ? rep.unstable_norm / (lam_t * base) : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json symbol_to_json(const TorusSymbol& a) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [l, c] : a.coeffs)
        arr.push_back({{"l", {l.first, l.second}}, {"re", c.real()}, {"im", c.imag()}});
    return arr;
}

inline TorusSymbol symbol_from_json(const nlohmann::json& j) {
    TorusSymbol a;
    for (const auto& e : j)
        a.coeffs[{e["l"][0].get<std::int64_t>(), e["l"][1].get<std::int64_t>()}] =
            Complex(e["re"].get<double>(), e["im"].get<double>());
    return a;
}

} // namespace catmap

#endif
