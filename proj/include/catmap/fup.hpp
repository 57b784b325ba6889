#ifndef CATMAP_FUP_HPP
#define CATMAP_FUP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "catmap/classical.hpp"
#include "catmap/errors.hpp"
#include "catmap/linalg.hpp"
#include "catmap/quantize.hpp"
#include "catmap/stats.hpp"
#include "catmap/words.hpp"

namespace catmap {

// ---------------------------------------------------------------------------
// IntervalSet: canonical merged union of closed intervals
// ---------------------------------------------------------------------------

struct IntervalSet {
    std::vector<std::pair<double, double>> intervals;

    IntervalSet() = default;
    explicit IntervalSet(std::vector<std::pair<double, double>> raw) {
        for (auto& [a, b] : raw)
            if (a > b) std::swap(a, b);
        std::sort(raw.begin(), raw.end());
        for (const auto& iv : raw) {
            if (!intervals.empty() && iv.first <= intervals.back().second)
                intervals.back().second = std::max(intervals.back().second, iv.second);
            else
                intervals.push_back(iv);
        }
    }

    bool empty() const { return intervals.empty(); }
    double min() const { return intervals.front().first; }
    double max() const { return intervals.back().second; }
};

struct PorosityQuery {
    double nu = 0;
    double tau0 = 0, tau1 = 0;
};

struct PorosityResult {
    bool porous = false;
    double certified_nu = 0;     // nu / 1.1, valid for every scale in range
    double witness_scale = 0;    // populated on failure
    double witness_position = 0;
};

namespace detail {

constexpr double kRay = 1e18;  // stand-in endpoint for unbounded gaps

/// Largest complement gap of omega inside the window [x, x+s].
inline double window_gap(const std::vector<std::pair<double, double>>& gaps, double x, double s) {
    double best = 0;
    for (const auto& [ga, gb] : gaps) {
        const double lo = std::max(ga, x);
        const double hi = std::min(gb, x + s);
        if (hi > lo) best = std::max(best, hi - lo);
    }
    return best;
}

/// min over all window positions x of the largest complement gap in
/// [x, x+s]. Exact: the per-gap clipped length is piecewise linear in
/// x, so the max is too; evaluate at gap-endpoint breakpoints and at
/// pairwise crossings inside each breakpoint segment.
inline std::pair<double, double> min_window_gap(const IntervalSet& omega, double s) {
    std::vector<std::pair<double, double>> gaps;
    gaps.push_back({-kRay, omega.min()});
    for (std::size_t i = 0; i + 1 < omega.intervals.size(); ++i)
        gaps.push_back({omega.intervals[i].second, omega.intervals[i + 1].first});
    gaps.push_back({omega.max(), kRay});

    std::vector<double> breaks;
    for (const auto& iv : omega.intervals) {
        for (const double e : {iv.first, iv.second}) {
            breaks.push_back(e);
            breaks.push_back(e - s);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    // outside [min - s, max] the window sits in an unbounded gap
    const double lo = omega.min() - s, hi = omega.max();
    std::vector<double> candidates;
    for (const double b : breaks)
        if (b >= lo - 1e-15 && b <= hi + 1e-15) candidates.push_back(b);
    candidates.push_back(lo);
    candidates.push_back(hi);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // crossings of the top pair inside each segment
    std::vector<double> probes = candidates;
    for (std::size_t seg = 0; seg + 1 < candidates.size(); ++seg) {
        const double x0 = candidates[seg], x1 = candidates[seg + 1];
        if (x1 - x0 < 1e-15) continue;
        for (std::size_t p = 0; p < gaps.size(); ++p) {
            const double p0 = std::max(0.0, std::min(gaps[p].second, x0 + s) - std::max(gaps[p].first, x0));
            const double p1 = std::max(0.0, std::min(gaps[p].second, x1 + s) - std::max(gaps[p].first, x1));
            for (std::size_t q = p + 1; q < gaps.size(); ++q) {
                const double q0 = std::max(0.0, std::min(gaps[q].second, x0 + s) - std::max(gaps[q].first, x0));
                const double q1 = std::max(0.0, std::min(gaps[q].second, x1 + s) - std::max(gaps[q].first, x1));
                const double d0 = p0 - q0, d1 = p1 - q1;
                if ((d0 > 0) == (d1 > 0)) continue;
                const double t = d0 / (d0 - d1);
                probes.push_back(x0 + t * (x1 - x0));
            }
        }
    }
    double best = std::numeric_limits<double>::infinity();
    double best_x = lo;
    for (const double x : probes) {
        const double g = window_gap(gaps, x, s);
        if (g < best) {
            best = g;
            best_x = x;
        }
    }
    return {best, best_x};
}

} // namespace detail

/// Certifies nu-porosity of omega on the geometric scale grid
/// {tau1 * 1.1^-i} within [tau0, tau1]; the down-converted value
/// certified_nu = nu/1.1 then holds for every scale in the range.
inline PorosityResult porosity_check(const IntervalSet& omega, const PorosityQuery& query) {
    if (!(query.tau0 > 0 && query.tau0 <= query.tau1))
        throw DegenerateScales("need 0 < tau0 <= tau1");
    PorosityResult res;
    res.certified_nu = query.nu / 1.1;
    res.porous = true;
    if (omega.empty()) return res;

    std::vector<double> scales;
    for (double s = query.tau1; s >= query.tau0 * (1 - 1e-12); s /= 1.1) scales.push_back(s);
    if (scales.empty() || scales.back() > query.tau0) scales.push_back(query.tau0);

    for (const double s : scales) {
        const auto [gap, x] = detail::min_window_gap(omega, s);
        if (gap < query.nu * s) {
            res.porous = false;
            res.witness_scale = s;
            res.witness_position = x;
            return res;
        }
    }
    return res;
}

/// Largest nu on a 1e-3 grid passing porosity_check.
inline double max_porosity(const IntervalSet& omega, double tau0, double tau1) {
    if (omega.empty()) return 0.999;
    std::int64_t lo = 0, hi = 999;  // nu = k/1000
    while (lo < hi) {
        const std::int64_t mid = (lo + hi + 1) / 2;
        PorosityQuery q{static_cast<double>(mid) / 1000.0, tau0, tau1};
        if (porosity_check(omega, q).porous)
            lo = mid;
        else
            hi = mid - 1;
    }
    return static_cast<double>(lo) / 1000.0;
}

// ---------------------------------------------------------------------------
// Cantor families
// ---------------------------------------------------------------------------

struct CantorSet {
    IntervalSet intervals;
    std::vector<std::int64_t> residues;  // allowed residues mod base^level
    std::int64_t base = 3;
    std::int64_t level = 1;
};

inline CantorSet cantor_set(std::int64_t base, const std::vector<std::int64_t>& digits,
                            std::int64_t level) {
    if (base < 3 || level < 1) throw BadDigits("need base >= 3, level >= 1");
    std::vector<std::int64_t> d(digits);
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    if (d.empty() || static_cast<std::int64_t>(d.size()) >= base)
        throw BadDigits("digits must be a nonempty proper subset");
    for (const std::int64_t x : d)
        if (x < 0 || x >= base) throw BadDigits("digit out of range");

    CantorSet cs;
    cs.base = base;
    cs.level = level;
    cs.residues = {0};
    for (std::int64_t k = 0; k < level; ++k) {
        std::vector<std::int64_t> next;
        for (const std::int64_t r : cs.residues)
            for (const std::int64_t dig : d) next.push_back(r * base + dig);
        cs.residues = std::move(next);
    }
    std::sort(cs.residues.begin(), cs.residues.end());
    double denom = 1;
    for (std::int64_t k = 0; k < level; ++k) denom *= static_cast<double>(base);
    std::vector<std::pair<double, double>> ivs;
    for (const std::int64_t r : cs.residues)
        ivs.push_back({static_cast<double>(r) / denom, static_cast<double>(r + 1) / denom});
    cs.intervals = IntervalSet(std::move(ivs));
    return cs;
}

// ---------------------------------------------------------------------------
// Discrete FUP norms
// ---------------------------------------------------------------------------

/// Largest singular value of the |Y| x |X| submatrix of the inverse
/// unitary DFT (entries e^{+2 pi i jk/N}/sqrt(N), rows Y, columns X).
inline double dft_localization_norm(const std::vector<std::int64_t>& X,
                                    const std::vector<std::int64_t>& Y, std::int64_t N) {
    if (X.empty() || Y.empty()) throw EmptySet("dft_localization_norm needs nonempty X, Y");
    MatrixXcd sub(static_cast<Eigen::Index>(Y.size()), static_cast<Eigen::Index>(X.size()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (std::size_t r = 0; r < Y.size(); ++r) {
        for (std::size_t c = 0; c < X.size(); ++c) {
            const std::int64_t jk = ((Y[r] % N) * (X[c] % N)) % N;
            sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                scale * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(jk) /
                                            static_cast<double>(N));
        }
    }
    return operator_norm(sub);
}

namespace detail {

/// cyclic distance from each index of Z_N to the set S
inline std::vector<double> cyclic_distances(const std::vector<std::int64_t>& S, std::int64_t N) {
    std::vector<double> d(static_cast<std::size_t>(N), std::numeric_limits<double>::infinity());
    for (std::int64_t j = 0; j < N; ++j) {
        for (const std::int64_t s : S) {
            const std::int64_t diff = std::llabs(((j - s) % N + N) % N);
            const double dist = static_cast<double>(std::min(diff, N - diff));
            d[static_cast<std::size_t>(j)] = std::min(d[static_cast<std::size_t>(j)], dist);
        }
    }
    return d;
}

} // namespace detail

struct SmoothFupNorms {
    double smooth = 0;           // trapezoid weights w(j) = clamp(1 - d/s, 0, 1)
    double sharp_thickened = 0;  // indicators of the s-thickened sets
};

/// Smooth cutoffs versus sharp thickened indicators; the smooth value
/// never exceeds the sharp one since the weights are dominated
/// pointwise.
inline SmoothFupNorms smooth_dft_localization_norm(const std::vector<std::int64_t>& X,
                                                   const std::vector<std::int64_t>& Y,
                                                   std::int64_t N, double s) {
    if (X.empty() || Y.empty()) throw EmptySet("smooth FUP norm needs nonempty X, Y");
    const std::vector<double> dx = detail::cyclic_distances(X, N);
    const std::vector<double> dy = detail::cyclic_distances(Y, N);
    MatrixXcd f(N, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (std::int64_t j = 0; j < N; ++j)
        for (std::int64_t k = 0; k < N; ++k)
            f(j, k) = scale * std::polar(1.0, 2.0 * std::numbers::pi *
                                                  static_cast<double>((j * k) % N) /
                                                  static_cast<double>(N));
    VectorXcd wx(N), wy(N), ix(N), iy(N);
    for (std::int64_t j = 0; j < N; ++j) {
        wx(j) = std::clamp(1.0 - dx[static_cast<std::size_t>(j)] / s, 0.0, 1.0);
        wy(j) = std::clamp(1.0 - dy[static_cast<std::size_t>(j)] / s, 0.0, 1.0);
        ix(j) = dx[static_cast<std::size_t>(j)] <= s ? 1.0 : 0.0;
        iy(j) = dy[static_cast<std::size_t>(j)] <= s ? 1.0 : 0.0;
    }
    SmoothFupNorms out;
    out.smooth = operator_norm(wy.asDiagonal() * f * wx.asDiagonal());
    out.sharp_thickened = operator_norm(iy.asDiagonal() * f * ix.asDiagonal());
    return out;
}

struct FupResult {
    std::vector<std::int64_t> N_values;
    std::vector<double> norms;
    double beta_hat = 0;
    double r_squared = 0;
};

/// beta_hat = OLS slope of -log(norm) against log(N).
inline FupResult fit_beta(const std::vector<std::pair<std::int64_t, double>>& results) {
    if (results.size() < 3) throw InsufficientData("fit_beta needs >= 3 points");
    FupResult out;
    std::vector<double> x, y;
    for (const auto& [n, norm] : results) {
        if (!(norm > 0)) throw InsufficientData("fit_beta needs positive norms");
        out.N_values.push_back(n);
        out.norms.push_back(norm);
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(-std::log(norm));
    }
    const OlsFit fit = ols_fit(x, y);
    out.beta_hat = fit.slope;
    out.r_squared = fit.r_squared;
    return out;
}

// ---------------------------------------------------------------------------
// Mollified cell cutoff and propagated-support projections
// ---------------------------------------------------------------------------

struct BumpStencil {
    std::vector<Vector2d> offsets;
    std::vector<double> weights;  // normalized to sum 1
};

namespace detail {

inline BumpStencil bump_stencil(double kappa, int half_samples = 10) {
    BumpStencil st;
    const double r = kappa / 2.0;
    const int n = half_samples;
    double total = 0;
    for (int i = -n; i <= n; ++i) {
        for (int j = -n; j <= n; ++j) {
            const Vector2d o(r * i / n, r * j / n);
            const double rho2 = o.squaredNorm() / (r * r);
            if (rho2 >= 1.0) continue;
            const double w = std::exp(-1.0 / (1.0 - rho2));
            st.offsets.push_back(o);
            st.weights.push_back(w);
            total += w;
        }
    }
    for (double& w : st.weights) w /= total;
    return st;
}

} // namespace detail

/// Mollified indicator 1^kappa_{S0} at a point: the half-open cell
/// indicator convolved with a normalized radial bump of radius
/// kappa/2; translate-sums over the lattice are exactly 1.
inline double cell_cutoff_value(const LatticeCell& cell, const BumpStencil& stencil,
                                const Vector2d& p) {
    double acc = 0;
    for (std::size_t i = 0; i < stencil.offsets.size(); ++i)
        if (in_cell(cell, p - stencil.offsets[i])) acc += stencil.weights[i];
    return acc;
}

struct CellCutoffGrid {
    Eigen::MatrixXd values;  // values(i, j) at origin + (i*step, j*step)
    Vector2d origin;
    double step = 0;
};

inline CellCutoffGrid cell_cutoff(const LatticeCell& cell, double kappa, std::int64_t resolution) {
    if (kappa != cell.kappa) throw KappaTooLarge("kappa must match the cell thickening");
    const BumpStencil st = detail::bump_stencil(kappa);
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (double s : {-cell.expand, 1.0 + cell.expand}) {
        for (double t : {-cell.expand, 1.0 + cell.expand}) {
            const Vector2d c = s * cell.P + t * cell.Pprime;
            if (first) {
                xmin = xmax = c.x();
                ymin = ymax = c.y();
                first = false;
            } else {
                xmin = std::min(xmin, c.x());
                xmax = std::max(xmax, c.x());
                ymin = std::min(ymin, c.y());
                ymax = std::max(ymax, c.y());
            }
        }
    }
    CellCutoffGrid g;
    g.origin = Vector2d(xmin - kappa, ymin - kappa);
    g.step = std::max(xmax - xmin, ymax - ymin) / static_cast<double>(resolution) +
             2.0 * kappa / static_cast<double>(resolution);
    g.values.resize(resolution, resolution);
    for (std::int64_t i = 0; i < resolution; ++i)
        for (std::int64_t j = 0; j < resolution; ++j)
            g.values(i, j) =
                cell_cutoff_value(cell, st, g.origin + Vector2d(i * g.step, j * g.step));
    return g;
}

// ---------------------------------------------------------------------------
// Propagated-support projection
// ---------------------------------------------------------------------------

enum class ProjectionSide { plus, minus };

struct SupportProjection {
    IntervalSet set;
    double step = 0;  // grid resolution of the rasterization
};

namespace detail {

/// Periodic bilinear lookup table for a symbol on the torus.
struct SymbolTable {
    Eigen::MatrixXd grid;
    std::int64_t M = 0;

    explicit SymbolTable(const TorusSymbol& a, std::int64_t M_)
        : grid(grid_evaluate(a, M_)), M(M_) {}

    double operator()(double y, double eta) const {
        const double u = mod1(y) * static_cast<double>(M);
        const double v = mod1(eta) * static_cast<double>(M);
        const std::int64_t i0 = static_cast<std::int64_t>(u) % M;
        const std::int64_t j0 = static_cast<std::int64_t>(v) % M;
        const std::int64_t i1 = (i0 + 1) % M, j1 = (j0 + 1) % M;
        const double fu = u - std::floor(u), fv = v - std::floor(v);
        return grid(i0, j0) * (1 - fu) * (1 - fv) + grid(i1, j0) * fu * (1 - fv) +
               grid(i0, j1) * (1 - fu) * fv + grid(i1, j1) * fu * fv;
    }
};

} // namespace detail

/// Rasterizes the propagated product symbol
///   b_w = prod_k a_{w_k}(gamma^k iota p) * 1^kappa_{S0}(p)
/// over the thickened cell, thresholds it, and projects the support
/// onto the y axis (plus side, k = 1..T') or the eta axis (minus
/// side, k = -T'+1..0).
inline SupportProjection support_projection(const PartitionPair& partition,
                                            const HyperbolicMap& map, const LatticeCell& cell,
                                            const Word& w, ProjectionSide side, double kappa,
                                            std::int64_t resolution = 1024,
                                            double threshold = 1e-6,
                                            const CellCutoffGrid* cutoff = nullptr) {
    const std::int64_t Tp = static_cast<std::int64_t>(w.letters.size());
    const std::int64_t table_res = 512;
    const detail::SymbolTable t1(partition.a1, table_res);
    const detail::SymbolTable t2(partition.a2, table_res);

    CellCutoffGrid local;
    if (!cutoff) {
        local = cell_cutoff(cell, kappa, resolution);
        cutoff = &local;
    }
    const std::int64_t res = cutoff->values.rows();

    // gamma^k iota as explicit 2x2 real matrices
    std::vector<Matrix2d> frames;
    for (std::int64_t idx = 0; idx < Tp; ++idx) {
        const std::int64_t k = side == ProjectionSide::plus ? idx + 1 : idx - Tp + 1;
        const IntMat2 g = int_mat_pow(map.entries, k);
        Matrix2d gr;
        gr << static_cast<double>(g.a), static_cast<double>(g.b), static_cast<double>(g.c),
            static_cast<double>(g.d);
        frames.push_back(gr * map.iota);
    }

    std::vector<char> hit(static_cast<std::size_t>(res), 0);
    for (std::int64_t i = 0; i < res; ++i) {
        for (std::int64_t j = 0; j < res; ++j) {
            double v = cutoff->values(i, j);
            if (v <= threshold) continue;
            const Vector2d p = cutoff->origin + Vector2d(i * cutoff->step, j * cutoff->step);
            for (std::int64_t idx = 0; idx < Tp && v > threshold; ++idx) {
                const Vector2d q = frames[static_cast<std::size_t>(idx)] * p;
                const double a =
                    w.letters[static_cast<std::size_t>(idx)] == 1 ? t1(q.x(), q.y()) : t2(q.x(), q.y());
                v *= std::max(a, 0.0);
            }
            if (v > threshold) hit[static_cast<std::size_t>(side == ProjectionSide::plus ? i : j)] = 1;
        }
    }
    std::vector<std::pair<double, double>> cells;
    const double base =
        side == ProjectionSide::plus ? cutoff->origin.x() : cutoff->origin.y();
    for (std::int64_t i = 0; i < res; ++i)
        if (hit[static_cast<std::size_t>(i)])
            cells.push_back({base + i * cutoff->step, base + (i + 1) * cutoff->step});
    SupportProjection out;
    out.set = IntervalSet(std::move(cells));
    out.step = cutoff->step;
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json interval_set_to_json(const IntervalSet& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [a, b] : s.intervals) arr.push_back({a, b});
    return {{"intervals", arr}};
}

} // namespace catmap

#endif
