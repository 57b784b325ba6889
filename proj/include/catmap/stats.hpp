#ifndef CATMAP_STATS_HPP
#define CATMAP_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "catmap/errors.hpp"

namespace catmap {

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
inline OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientData("ols_fit needs >= 2 matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    OlsFit fit;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

/// Mann-Kendall trend statistic, normal approximation with tie correction.
/// Returns the Z score; Z < -1.645 signals a decreasing trend at the
/// one-sided 5% level.
inline double mann_kendall_z(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw InsufficientData("mann_kendall_z needs >= 3 points");
    long long s = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (v[j] > v[i]) ++s;
            else if (v[j] < v[i]) --s;
        }
    // tie groups
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * (t - 1) * (2 * t + 5);
        i = j;
    }
    const double nn = static_cast<double>(n);
    const double var = (nn * (nn - 1) * (2 * nn + 5) - tie_term) / 18.0;
    if (var <= 0) return 0.0;
    double z = 0.0;
    if (s > 0) z = (static_cast<double>(s) - 1) / std::sqrt(var);
    else if (s < 0) z = (static_cast<double>(s) + 1) / std::sqrt(var);
    return z;
}

} // namespace catmap

#endif
