#ifndef CATMAP_CLASSICAL_HPP
#define CATMAP_CLASSICAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "catmap/errors.hpp"
#include "catmap/linalg.hpp"

namespace catmap {

// ---------------------------------------------------------------------------
// Integer 2x2 matrices
// ---------------------------------------------------------------------------

struct IntMat2 {
    // row-major [[a,b],[c,d]]
    std::int64_t a = 1, b = 0, c = 0, d = 1;

    std::int64_t det() const { return a * d - b * c; }
    std::int64_t trace() const { return a + d; }

    IntMat2 inverse_unimodular() const { return {d, -b, -c, a}; }

    std::array<std::int64_t, 2> apply(std::int64_t x, std::int64_t y) const {
        return {a * x + b * y, c * x + d * y};
    }
};

inline IntMat2 checked_mul(const IntMat2& p, const IntMat2& q) {
    auto mul = [](std::int64_t x, std::int64_t y) {
        std::int64_t r;
        if (__builtin_mul_overflow(x, y, &r)) throw CutoffOverflow("integer matrix power overflow");
        return r;
    };
    auto add = [](std::int64_t x, std::int64_t y) {
        std::int64_t r;
        if (__builtin_add_overflow(x, y, &r)) throw CutoffOverflow("integer matrix power overflow");
        return r;
    };
    return {add(mul(p.a, q.a), mul(p.b, q.c)), add(mul(p.a, q.b), mul(p.b, q.d)),
            add(mul(p.c, q.a), mul(p.d, q.c)), add(mul(p.c, q.b), mul(p.d, q.d))};
}

/// m^power for unimodular m; negative powers use the adjugate inverse.
inline IntMat2 int_mat_pow(IntMat2 m, std::int64_t power) {
    if (power < 0) {
        m = m.inverse_unimodular();
        power = -power;
    }
    IntMat2 acc;
    while (power > 0) {
        if (power & 1) acc = checked_mul(acc, m);
        power >>= 1;
        if (power) m = checked_mul(m, m);
    }
    return acc;
}

/// extended gcd: returns (g, x, y) with a*x + b*y = g.
inline std::array<std::int64_t, 3> ext_gcd(std::int64_t a, std::int64_t b) {
    if (b == 0) return {a >= 0 ? a : -a, a >= 0 ? 1 : -1, 0};
    auto [g, x, y] = ext_gcd(b, a % b);
    return {g, y, x - (a / b) * y};
}

// ---------------------------------------------------------------------------
// HyperbolicMap
// ---------------------------------------------------------------------------

struct HyperbolicMap {
    IntMat2 entries;
    double lambda_u = 0;  // |lambda_u| > 1
    double lambda_s = 0;  // lambda_u * lambda_s = 1
    double m_u = 0, m_s = 0;  // eigenline slopes
    Vector2d v_u, v_s;
    Matrix2d iota, iota_inv;

    Matrix2d real() const {
        Matrix2d g;
        g << static_cast<double>(entries.a), static_cast<double>(entries.b),
            static_cast<double>(entries.c), static_cast<double>(entries.d);
        return g;
    }
};

namespace detail {

/// True if x is within c/q^2 of some rational p/q with q <= q_max.
/// Checks continued-fraction convergents, which realize the best
/// rational approximations. The 1/q^2 scaling separates doubles that
/// round actual rationals (error ~ machine eps) from quadratic
/// irrationals, which stay at least ~1/(3q^2) away from every p/q.
inline bool near_rational(double x, std::int64_t q_max, double c) {
    double frac = x;
    std::int64_t p_prev = 1, q_prev = 0;
    std::int64_t p_cur = static_cast<std::int64_t>(std::floor(frac));
    std::int64_t q_cur = 1;
    double rem = frac - std::floor(frac);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(x - static_cast<double>(p_cur) / static_cast<double>(q_cur)) <=
            c / (static_cast<double>(q_cur) * static_cast<double>(q_cur)))
            return true;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
        const double fl = std::floor(frac);
        if (fl > 4e18) break;
        const std::int64_t coef = static_cast<std::int64_t>(fl);
        rem = frac - fl;
        std::int64_t p_next, q_next;
        if (__builtin_mul_overflow(coef, p_cur, &p_next) ||
            __builtin_add_overflow(p_next, p_prev, &p_next) ||
            __builtin_mul_overflow(coef, q_cur, &q_next) ||
            __builtin_add_overflow(q_next, q_prev, &q_next))
            break;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        if (q_cur > q_max) break;
    }
    return false;
}

} // namespace detail

/// Validates gamma in Gamma~(2) and computes its eigendata and the
/// iota coordinate frame.
inline HyperbolicMap validate_map(const IntMat2& m) {
    if (m.det() != 1) throw NotUnimodular("det must be 1");
    if ((m.a * m.b) % 2 != 0 || (m.c * m.d) % 2 != 0)
        throw NotInGamma2("parity condition a11*a12 = a21*a22 = 0 mod 2 fails");
    const std::int64_t tr = m.trace();
    if (std::llabs(tr) <= 2) throw NotHyperbolic("|trace| must exceed 2");

    HyperbolicMap h;
    h.entries = m;
    const double t = static_cast<double>(tr);
    const double disc = std::sqrt(t * t - 4.0);
    // |lambda_u| > 1: take the root matching the sign of the trace.
    h.lambda_u = (t + (t > 0 ? disc : -disc)) / 2.0;
    h.lambda_s = 1.0 / h.lambda_u;
    // b = 0 would force integer eigenvalues +-1, excluded by hyperbolicity.
    h.m_u = (h.lambda_u - static_cast<double>(m.a)) / static_cast<double>(m.b);
    h.m_s = (h.lambda_s - static_cast<double>(m.a)) / static_cast<double>(m.b);
    h.v_u = Vector2d(1.0, h.m_u);
    h.v_s = Vector2d(1.0, h.m_s);

    const double span = h.m_u - h.m_s;
    if (span > 0) {
        const double s = 1.0 / std::sqrt(span);
        h.iota << s, -s, s * h.m_u, -s * h.m_s;
    } else {
        // negate both eigenvectors to keep det(iota) = 1
        const double s = 1.0 / std::sqrt(-span);
        h.iota << -s, s, -s * h.m_u, s * h.m_s;
    }
    h.iota_inv = h.iota.inverse();

    // certify eigen-slope irrationality at desk precision
    if (detail::near_rational(h.m_u, 1000000, 1e-3) ||
        detail::near_rational(h.m_s, 1000000, 1e-3))
        throw NotHyperbolic("eigen-slope numerically rational");
    return h;
}

// ---------------------------------------------------------------------------
// Torus points
// ---------------------------------------------------------------------------

using TorusPoint = Vector2d;

inline double mod1(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r -= 1.0;
    return r;
}

inline TorusPoint wrap_torus(const TorusPoint& p) { return {mod1(p.x()), mod1(p.y())}; }

/// Euclidean distance on the torus (min over lattice translates).
inline double torus_dist(const TorusPoint& p, const TorusPoint& q) {
    double dx = std::abs(mod1(p.x() - q.x()));
    double dy = std::abs(mod1(p.y() - q.y()));
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
    return std::hypot(dx, dy);
}

/// sup-norm distance on the torus.
inline double torus_dist_inf(const TorusPoint& p, const TorusPoint& q) {
    double dx = std::abs(mod1(p.x() - q.x()));
    double dy = std::abs(mod1(p.y() - q.y()));
    dx = std::min(dx, 1.0 - dx);
    dy = std::min(dy, 1.0 - dy);
    return std::max(dx, dy);
}

/// gamma^power applied to a torus point, coordinates reduced to [0,1).
inline TorusPoint apply_map(const HyperbolicMap& map, const TorusPoint& p, std::int64_t power) {
    const IntMat2 g = int_mat_pow(map.entries, power);
    const double y = static_cast<double>(g.a) * p.x() + static_cast<double>(g.b) * p.y();
    const double e = static_cast<double>(g.c) * p.x() + static_cast<double>(g.d) * p.y();
    return wrap_torus({y, e});
}

// ---------------------------------------------------------------------------
// LatticeCell: fundamental cell of iota^{-1} Z^2
// ---------------------------------------------------------------------------

struct LatticeCell {
    Vector2d P, Pprime;
    std::array<std::int64_t, 2> nm{0, 0};  // P = iota_inv * (n, m)
    std::array<std::int64_t, 2> kl{0, 0};  // Pprime = iota_inv * (k, l), n*l - k*m = 1
    double kappa = 0;
    double ell_y = 0, ell_eta = 0, ell = 0;
    // (s,t)-range half-expansion of the thickened cell S0(kappa)
    double expand = 0;
};

/// Shortest nonzero vector of iota^{-1} Z^2, completed to a unimodular
/// cell basis; the thickening kappa must leave the cell interior
/// nonempty.
inline LatticeCell shortest_cell_basis(const HyperbolicMap& map, double kappa) {
    if (kappa <= 0) throw KappaTooLarge("kappa must be positive");
    LatticeCell cell;
    cell.kappa = kappa;

    const double bound_d = 2.0 * map.iota.cwiseAbs().sum() + 2.0;
    const std::int64_t bound = static_cast<std::int64_t>(std::ceil(bound_d));
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t n = -bound; n <= bound; ++n) {
        for (std::int64_t m = -bound; m <= bound; ++m) {
            if (n == 0 && m == 0) continue;
            const Vector2d v = map.iota_inv * Vector2d(static_cast<double>(n), static_cast<double>(m));
            const double nrm = v.norm();
            if (nrm < best - 1e-12 ||
                (nrm < best + 1e-12 &&
                 std::array<std::int64_t, 2>{n, m} < cell.nm)) {
                // canonical sign: first nonzero coordinate positive
                if (n < 0 || (n == 0 && m < 0)) continue;
                best = std::min(best, nrm);
                cell.nm = {n, m};
                cell.P = v;
            }
        }
    }
    // Bezout completion n*l - k*m = 1
    auto [g, x, y] = ext_gcd(cell.nm[0], cell.nm[1]);
    (void)g;  // shortest vectors have coprime coordinates
    cell.kl = {-y, x};
    cell.Pprime = map.iota_inv * Vector2d(static_cast<double>(cell.kl[0]), static_cast<double>(cell.kl[1]));

    // inradius of the parallelogram spanned by P, Pprime (unit area)
    const double inradius = 0.5 * std::min(1.0 / cell.P.norm(), 1.0 / cell.Pprime.norm());
    if (kappa >= inradius)
        throw KappaTooLarge("thickened cell has empty kappa-interior");

    cell.expand = kappa / (cell.P.norm() + cell.Pprime.norm());
    double ymin = 0, ymax = 0, emin = 0, emax = 0;
    bool first = true;
    for (double s : {-cell.expand, 1.0 + cell.expand}) {
        for (double t : {-cell.expand, 1.0 + cell.expand}) {
            const Vector2d c = s * cell.P + t * cell.Pprime;
            if (first) {
                ymin = ymax = c.x();
                emin = emax = c.y();
                first = false;
            } else {
                ymin = std::min(ymin, c.x());
                ymax = std::max(ymax, c.x());
                emin = std::min(emin, c.y());
                emax = std::max(emax, c.y());
            }
        }
    }
    cell.ell_y = ymax - ymin;
    cell.ell_eta = emax - emin;
    cell.ell = std::max(cell.ell_y, cell.ell_eta);
    return cell;
}

/// Membership of a plane point in S^0 = {sP + tP' : s,t in [0,1)}.
inline bool in_cell(const LatticeCell& cell, const Vector2d& p) {
    // invert [P | P'] (unit determinant up to sign)
    const double det = cell.P.x() * cell.Pprime.y() - cell.P.y() * cell.Pprime.x();
    const double s = (p.x() * cell.Pprime.y() - p.y() * cell.Pprime.x()) / det;
    const double t = (cell.P.x() * p.y() - cell.P.y() * p.x()) / det;
    return s >= 0.0 && s < 1.0 && t >= 0.0 && t < 1.0;
}

// ---------------------------------------------------------------------------
// Unstable orbit cover
// ---------------------------------------------------------------------------

struct OrbitCover {
    double L = 0;     // certified orbit length
    double ell = 0;   // guaranteed sub-orbit length inside each ball
    int grid_starts = 0;
    double dt = 0;
};

/// Searches for the smallest tested L such that every sampled unstable
/// orbit of length L contains sub-orbits of length ell inside both
/// balls K'_e = B(center_e, radius/4) (sup-norm balls). Certified only
/// at the sampling resolution.
inline OrbitCover unstable_orbit_cover(const HyperbolicMap& map, const TorusPoint& k1_center,
                                       const TorusPoint& k2_center, double radius, double L_max,
                                       int grid_per_axis = 100, double dt = 1e-3) {
    if (radius <= 0) throw Error("radius must be positive");
    OrbitCover out;
    out.ell = radius / 8.0;
    out.grid_starts = grid_per_axis * grid_per_axis;
    out.dt = dt;
    const double ball_r = radius / 4.0;
    const Vector2d dir = map.v_u.normalized();

    // covering balls: every orbit is inside both from the start
    if (ball_r >= 0.5) {
        out.L = out.ell;
        return out;
    }

    double worst_completion = 0.0;
    const int max_steps = static_cast<int>(std::ceil(L_max / dt));
    for (int gi = 0; gi < grid_per_axis; ++gi) {
        for (int gj = 0; gj < grid_per_axis; ++gj) {
            const TorusPoint start(static_cast<double>(gi) / grid_per_axis,
                                   static_cast<double>(gj) / grid_per_axis);
            double run1 = 0, run2 = 0;
            bool done1 = false, done2 = false;
            double completion = -1;
            for (int step = 0; step <= max_steps; ++step) {
                const double t = step * dt;
                const TorusPoint p = wrap_torus(start + t * dir);
                if (torus_dist_inf(p, k1_center) <= ball_r) run1 += dt; else run1 = 0;
                if (torus_dist_inf(p, k2_center) <= ball_r) run2 += dt; else run2 = 0;
                if (run1 >= out.ell) done1 = true;
                if (run2 >= out.ell) done2 = true;
                if (done1 && done2) {
                    completion = t;
                    break;
                }
            }
            if (completion < 0) throw NotFound("orbit cover: L_max exceeded");
            worst_completion = std::max(worst_completion, completion);
        }
    }
    out.L = std::max(worst_completion, out.ell);
    return out;
}

// ---------------------------------------------------------------------------
// Random Gamma~(2) generation
// ---------------------------------------------------------------------------

inline IntMat2 degli_esposti() { return {2, 1, 3, 2}; }

/// Random hyperbolic element of Gamma~(2): word product of length <= 6
/// over {gamma_DE, gamma_DE^T}, rejection-sampled for hyperbolicity.
inline HyperbolicMap random_gamma2_map(std::mt19937_64& rng) {
    const IntMat2 g = degli_esposti();
    const IntMat2 gt{2, 3, 1, 2};
    std::uniform_int_distribution<int> len_dist(1, 6);
    std::uniform_int_distribution<int> pick(0, 1);
    for (;;) {
        IntMat2 acc;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) acc = checked_mul(acc, pick(rng) ? g : gt);
        if (std::llabs(acc.trace()) <= 2) continue;
        try {
            return validate_map(acc);
        } catch (const Error&) {
            continue;
        }
    }
}

} // namespace catmap

#endif
