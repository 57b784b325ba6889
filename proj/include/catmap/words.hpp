#ifndef CATMAP_WORDS_HPP
#define CATMAP_WORDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "catmap/errors.hpp"
#include "catmap/linalg.hpp"
#include "catmap/observables.hpp"
#include "catmap/propagator.hpp"
#include "catmap/quantize.hpp"
#include "catmap/stats.hpp"

namespace catmap {

struct Word {
    std::vector<int> letters;  // over {1, 2}

    static Word all(int letter, std::int64_t n) { return {std::vector<int>(static_cast<std::size_t>(n), letter)}; }

    static Word from_bits(std::uint64_t bits, std::int64_t n) {
        Word w;
        for (std::int64_t j = 0; j < n; ++j) w.letters.push_back((bits >> j) & 1 ? 1 : 2);
        return w;
    }
};

/// F(w) = fraction of letters equal to 1.
inline double control_value(const Word& w) {
    if (w.letters.empty()) throw EmptyWord("control function needs a nonempty word");
    const auto ones = std::count(w.letters.begin(), w.letters.end(), 1);
    return static_cast<double>(ones) / static_cast<double>(w.letters.size());
}

struct WordSchedule {
    std::int64_t T = 1;
    std::int64_t Tprime = 4;
    double rho = 0.5;
    double delta = 0.25;
};

inline WordSchedule make_schedule(std::int64_t T, double rho, double delta) {
    if (T < 1) throw EmptyWord("schedule needs T >= 1");
    return {T, 4 * T, rho, delta};
}

/// T = floor(rho log(1/h) / (4 log lambda_u)) with h = 1/(2 pi N).
inline WordSchedule schedule_from_N(std::int64_t N, double rho, double delta, double lambda_u) {
    const double log_inv_h = std::log(2.0 * std::numbers::pi * static_cast<double>(N));
    const std::int64_t T = static_cast<std::int64_t>(
        std::floor(rho * log_inv_h / (4.0 * std::log(std::abs(lambda_u)))));
    return make_schedule(std::max<std::int64_t>(T, 1), rho, delta);
}

struct WordClassification {
    std::vector<Word> Z;      // controlled words of length T
    std::int64_t count_Z = 0;
    double count_X = 0;       // (2^T - #Z)^8, may overflow integers
    WordSchedule schedule;
};

/// Z = {w in W(T) : F(w) >= delta}; X = (W(T) \ Z)^8 counted in
/// closed form.
inline WordClassification classify_words(const WordSchedule& schedule) {
    WordClassification cls;
    cls.schedule = schedule;
    const std::int64_t T = schedule.T;
    if (T > 30) throw CutoffOverflow("Z enumeration limited to T <= 30");
    for (std::uint64_t bits = 0; bits < (1ULL << T); ++bits) {
        const Word w = Word::from_bits(bits, T);
        if (control_value(w) >= schedule.delta) cls.Z.push_back(w);
    }
    cls.count_Z = static_cast<std::int64_t>(cls.Z.size());
    const long double uncontrolled =
        static_cast<long double>((1LL << T) - cls.count_Z);
    cls.count_X = static_cast<double>(std::pow(uncontrolled, 8.0L));
    return cls;
}

// ---------------------------------------------------------------------------
// Word operators
// ---------------------------------------------------------------------------

/// Shared per-(map, N) context: A_eps(j) = M^{-j} Op(a_eps) M^j, so
/// A_w collapses to M^{-(n-1)} Op_{w_{n-1}} (M Op_{w_{n-2}}) ... (M Op_{w_0}).
struct WordContext {
    QuantumCatMap qcm;
    MatrixXcd op1, op2;      // Op_N(a_1), Op_N(a_2)
    MatrixXcd mop1, mop2;    // M Op_N(a_eps), the DFS step factors

    WordContext(const PartitionPair& partition, QuantumCatMap q) : qcm(std::move(q)) {
        op1 = op_matrix(partition.a1, qcm.spec);
        op2 = op_matrix(partition.a2, qcm.spec);
        mop1 = qcm.matrix * op1;
        mop2 = qcm.matrix * op2;
    }

    const MatrixXcd& op(int letter) const { return letter == 1 ? op1 : op2; }
    const MatrixXcd& mop(int letter) const { return letter == 1 ? mop1 : mop2; }

    /// A_w = A_{w_{n-1}}(n-1) ... A_{w_0}
    MatrixXcd word_operator(const Word& w) const {
        const std::int64_t N = qcm.spec.N;
        if (w.letters.empty()) return MatrixXcd::Identity(N, N);
        const std::int64_t n = static_cast<std::int64_t>(w.letters.size());
        MatrixXcd acc = op(w.letters[static_cast<std::size_t>(n - 1)]);
        for (std::int64_t j = n - 2; j >= 0; --j)
            acc = acc * mop(w.letters[static_cast<std::size_t>(j)]);
        for (std::int64_t j = 0; j < n - 1; ++j) acc = qcm.matrix.adjoint() * acc;
        return acc;
    }

    /// sum over all w in W(n) of A_w, by direct summation with
    /// prefix-product caching (leftmost letter outermost in the DFS).
    MatrixXcd word_sum(std::int64_t n) const {
        const std::int64_t N = qcm.spec.N;
        if (n == 0) return MatrixXcd::Identity(N, N);
        MatrixXcd total = MatrixXcd::Zero(N, N);
        sum_rec(MatrixXcd(), n, n, total);
        for (std::int64_t j = 0; j < n - 1; ++j) total = qcm.matrix.adjoint() * total;
        return total;
    }

    /// sum over subsets: each word in the supplied list, summed.
    MatrixXcd class_sum(const std::vector<Word>& words) const {
        const std::int64_t N = qcm.spec.N;
        MatrixXcd total = MatrixXcd::Zero(N, N);
        for (const Word& w : words) total += word_operator(w);
        return total;
    }

  private:
    void sum_rec(const MatrixXcd& prefix, std::int64_t remaining, std::int64_t n,
                 MatrixXcd& total) const {
        if (remaining == 0) {
            total += prefix;
            return;
        }
        for (int letter : {1, 2}) {
            MatrixXcd next;
            if (remaining == n)
                next = op(letter);  // leftmost factor carries no M
            else
                next = prefix * mop(letter);
            sum_rec(next, remaining - 1, n, total);
        }
    }
};

/// ||sum_{w in W(n)} A_w - Id||
inline double partition_identity_defect(const WordContext& ctx, std::int64_t n) {
    const std::int64_t N = ctx.qcm.spec.N;
    return operator_norm(ctx.word_sum(n) - MatrixXcd::Identity(N, N));
}

inline MatrixXcd word_operator(const PartitionPair& partition, const QuantumCatMap& qcm,
                               const Word& w) {
    return WordContext(partition, qcm).word_operator(w);
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

struct ClassNormRow {
    std::int64_t N = 0;
    double all2_norm = 0;    // ||A_w|| for the all-2 word of length 8T
    double z_sum_norm = 0;   // ||A_Z|| for Z over W(T)
    std::vector<double> sampled_x_norms;
};

struct ClassNormScan {
    std::vector<ClassNormRow> rows;
    double beta_hat = 0;
    double r_squared = 0;
};

inline ClassNormScan class_norm_scan(const PartitionPair& partition, const HyperbolicMap& map,
                                     const WordSchedule& schedule,
                                     const std::vector<std::int64_t>& N_list,
                                     std::int64_t random_x_samples = 0, std::uint64_t seed = 0) {
    const WordClassification cls = classify_words(schedule);
    std::vector<Word> x_letters;  // uncontrolled T-blocks
    for (std::uint64_t bits = 0; bits < (1ULL << schedule.T); ++bits) {
        const Word w = Word::from_bits(bits, schedule.T);
        if (control_value(w) < schedule.delta) x_letters.push_back(w);
    }

    ClassNormScan scan;
    std::vector<double> logN, lognorm;
    std::mt19937_64 rng(seed);
    for (const std::int64_t N : N_list) {
        const HilbertSpec spec(N);
        WordContext ctx(partition, build_cat_matrix(map, spec));
        ClassNormRow row;
        row.N = N;
        row.all2_norm = operator_norm(ctx.word_operator(Word::all(2, 8 * schedule.T)));
        row.z_sum_norm = operator_norm(ctx.class_sum(cls.Z));
        if (random_x_samples > 0 && !x_letters.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, x_letters.size() - 1);
            for (std::int64_t s = 0; s < random_x_samples; ++s) {
                Word w;
                for (int block = 0; block < 8; ++block) {
                    const Word& blk = x_letters[pick(rng)];
                    w.letters.insert(w.letters.end(), blk.letters.begin(), blk.letters.end());
                }
                row.sampled_x_norms.push_back(operator_norm(ctx.word_operator(w)));
            }
        }
        logN.push_back(std::log(static_cast<double>(N)));
        lognorm.push_back(-std::log(row.all2_norm));
        scan.rows.push_back(std::move(row));
    }
    if (scan.rows.size() >= 2) {
        const OlsFit fit = ols_fit(logN, lognorm);
        scan.beta_hat = fit.slope;
        scan.r_squared = fit.r_squared;
    }
    return scan;
}

struct MainEstimateRow {
    std::int64_t N = 0;
    double c1_proxy = 0;       // 1 / min_j ||Op(a) phi_j||
    double env_c1 = 0, env_c2 = 0;
    double eigen_resid = 0;    // max_j min_z ||(M - z) phi_j|| at z = eigenvalue
};

/// Empirical constants for the estimate
/// ||u|| <= C1 ||Op(a)u|| + C2 log N min_z ||(M - z)u||.
inline std::vector<MainEstimateRow> main_estimate_probe(const PartitionPair& partition,
                                                        const HyperbolicMap& map,
                                                        const TorusSymbol& a,
                                                        const std::vector<std::int64_t>& N_list,
                                                        std::int64_t random_states = 50,
                                                        std::uint64_t seed = 0) {
    (void)partition;
    std::vector<MainEstimateRow> rows;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (const std::int64_t N : N_list) {
        const HilbertSpec spec(N);
        const QuantumCatMap qcm = build_cat_matrix(map, spec);
        const SpectralData sd = eigendecompose(qcm);
        const MatrixXcd op = op_matrix(a, spec);

        MainEstimateRow row;
        row.N = N;
        const MatrixXcd applied = op * sd.eigenvectors;
        double min_norm = std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j < N; ++j) min_norm = std::min(min_norm, applied.col(j).norm());
        row.c1_proxy = 1.0 / min_norm;

        const MatrixXcd mv = qcm.matrix * sd.eigenvectors;
        for (std::int64_t j = 0; j < N; ++j)
            row.eigen_resid = std::max(
                row.eigen_resid, (mv.col(j) - sd.eigenvalues(j) * sd.eigenvectors.col(j)).norm());

        // feasibility envelope over random unit states
        std::vector<double> xs, ys;
        const double logN = std::log(static_cast<double>(N));
        for (std::int64_t s = 0; s < random_states; ++s) {
            VectorXcd u(N);
            for (std::int64_t k = 0; k < N; ++k) u(k) = Complex(gauss(rng), gauss(rng));
            u.normalize();
            const double x = (op * u).norm();
            const VectorXcd muv = qcm.matrix * u;
            double min_z = std::numeric_limits<double>::infinity();
            for (int t = 0; t < 360; ++t) {
                const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * t / 360.0);
                min_z = std::min(min_z, (muv - z * u).norm());
            }
            xs.push_back(x);
            ys.push_back(logN * min_z);
        }
        // minimal (C1, C2) with C1 x_i + C2 y_i >= 1: vertex enumeration
        // of the two-variable LP minimizing C1 + C2
        double best = std::numeric_limits<double>::infinity();
        auto feasible = [&](double c1, double c2) {
            if (c1 < 0 || c2 < 0) return false;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (c1 * xs[i] + c2 * ys[i] < 1.0 - 1e-12) return false;
            return true;
        };
        auto consider = [&](double c1, double c2) {
            if (feasible(c1, c2) && c1 + c2 < best) {
                best = c1 + c2;
                row.env_c1 = c1;
                row.env_c2 = c2;
            }
        };
        const double min_x = *std::min_element(xs.begin(), xs.end());
        const double min_y = *std::min_element(ys.begin(), ys.end());
        if (min_x > 0) consider(1.0 / min_x, 0.0);
        if (min_y > 0) consider(0.0, 1.0 / min_y);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (std::size_t j = i + 1; j < xs.size(); ++j) {
                const double det = xs[i] * ys[j] - xs[j] * ys[i];
                if (std::abs(det) < 1e-15) continue;
                consider((ys[j] - ys[i]) / det, (xs[i] - xs[j]) / det);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace catmap

#endif
