#ifndef CATMAP_HILBERT_HPP
#define CATMAP_HILBERT_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "catmap/errors.hpp"
#include "catmap/linalg.hpp"

namespace catmap {

struct HilbertSpec {
    std::int64_t N = 1;

    explicit HilbertSpec(std::int64_t n = 1) : N(n) {
        if (n < 1) throw DimensionMismatch("N must be >= 1");
    }
    double h() const { return 1.0 / (2.0 * std::numbers::pi * static_cast<double>(N)); }
    bool operator==(const HilbertSpec& o) const { return N == o.N; }
};

struct StateVector {
    HilbertSpec spec;
    VectorXcd amplitudes;

    StateVector() = default;
    StateVector(HilbertSpec s, VectorXcd a) : spec(s), amplitudes(std::move(a)) {
        if (amplitudes.size() != spec.N) throw DimensionMismatch("amplitude count != N");
    }

    static StateVector basis(const HilbertSpec& s, std::int64_t j) {
        VectorXcd v = VectorXcd::Zero(s.N);
        v(j) = 1.0;
        return {s, std::move(v)};
    }

    double norm() const {
        return amplitudes.norm() / std::sqrt(static_cast<double>(spec.N));
    }
};

/// (1/N) sum_j f_j conj(g_j)
inline Complex inner_product(const StateVector& f, const StateVector& g) {
    if (!(f.spec == g.spec)) throw DimensionMismatch("inner_product: specs differ");
    return (f.amplitudes.array() * g.amplitudes.array().conjugate()).sum() /
           static_cast<double>(f.spec.N);
}

/// (T_{l/N} psi)_k = e^{i pi l1 l2 / N} e^{2 pi i l2 (k - l1) / N} psi_{(k-l1) mod N}
inline StateVector translation_apply(std::int64_t l1, std::int64_t l2, const StateVector& psi) {
    const std::int64_t N = psi.spec.N;
    // reduce the integer phase arguments first so large frequencies stay exact
    const std::int64_t c12 = ((l1 % (2 * N)) * (l2 % (2 * N))) % (2 * N);
    const Complex cocycle = std::polar(1.0, std::numbers::pi * static_cast<double>(c12) /
                                                static_cast<double>(N));
    const std::int64_t l2r = ((l2 % N) + N) % N;
    VectorXcd out(N);
    for (std::int64_t k = 0; k < N; ++k) {
        const std::int64_t src = (((k - l1) % N) + N) % N;
        const std::int64_t ph = (l2r * (src % N)) % N;
        out(k) = cocycle *
                 std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(ph) /
                                     static_cast<double>(N)) *
                 psi.amplitudes(src);
    }
    return {psi.spec, std::move(out)};
}

inline MatrixXcd translation_matrix(std::int64_t l1, std::int64_t l2, const HilbertSpec& spec) {
    const std::int64_t N = spec.N;
    MatrixXcd m = MatrixXcd::Zero(N, N);
    const std::int64_t c12 = ((l1 % (2 * N)) * (l2 % (2 * N))) % (2 * N);
    const Complex cocycle = std::polar(1.0, std::numbers::pi * static_cast<double>(c12) /
                                                static_cast<double>(N));
    const std::int64_t l1r = ((l1 % N) + N) % N;
    const std::int64_t l2r = ((l2 % N) + N) % N;
    for (std::int64_t j = 0; j < N; ++j) {
        const std::int64_t row = (j + l1r) % N;
        const std::int64_t ph = (l2r * j) % N;
        m(row, j) = cocycle * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(ph) /
                                                  static_cast<double>(N));
    }
    return m;
}

/// In-place accumulation out += c * T_{l/N}; one pass over N entries.
inline void add_scaled_translation(MatrixXcd& out, std::int64_t l1, std::int64_t l2,
                                   const Complex& c, const HilbertSpec& spec) {
    const std::int64_t N = spec.N;
    const std::int64_t c12 = ((l1 % (2 * N)) * (l2 % (2 * N))) % (2 * N);
    const Complex cocycle = c * std::polar(1.0, std::numbers::pi * static_cast<double>(c12) /
                                                    static_cast<double>(N));
    const std::int64_t l1r = ((l1 % N) + N) % N;
    const std::int64_t l2r = ((l2 % N) + N) % N;
    for (std::int64_t j = 0; j < N; ++j) {
        const std::int64_t row = (j + l1r) % N;
        const std::int64_t ph = (l2r * j) % N;
        out(row, j) += cocycle * std::polar(1.0, 2.0 * std::numbers::pi *
                                                     static_cast<double>(ph) /
                                                     static_cast<double>(N));
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json state_to_json(const StateVector& psi) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::int64_t k = 0; k < psi.spec.N; ++k)
        arr.push_back({psi.amplitudes(k).real(), psi.amplitudes(k).imag()});
    return arr;
}

inline StateVector state_from_json(const nlohmann::json& j) {
    const std::int64_t n = static_cast<std::int64_t>(j.size());
    HilbertSpec spec(n);
    VectorXcd v(n);
    for (std::int64_t k = 0; k < n; ++k)
        v(k) = Complex(j[static_cast<std::size_t>(k)][0].get<double>(),
                       j[static_cast<std::size_t>(k)][1].get<double>());
    return {spec, std::move(v)};
}

/// little-endian f64 interleaved re/im with an 8-byte N header
inline void state_write_binary(const StateVector& psi, std::ostream& os) {
    const std::uint64_t n = static_cast<std::uint64_t>(psi.spec.N);
    os.write(reinterpret_cast<const char*>(&n), 8);
    for (std::int64_t k = 0; k < psi.spec.N; ++k) {
        const double re = psi.amplitudes(k).real();
        const double im = psi.amplitudes(k).imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
}

inline StateVector state_read_binary(std::istream& is) {
    std::uint64_t n = 0;
    is.read(reinterpret_cast<char*>(&n), 8);
    if (!is || n == 0) throw DimensionMismatch("bad state header");
    HilbertSpec spec(static_cast<std::int64_t>(n));
    VectorXcd v(spec.N);
    for (std::int64_t k = 0; k < spec.N; ++k) {
        double re = 0, im = 0;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        v(k) = Complex(re, im);
    }
    if (!is) throw DimensionMismatch("truncated state payload");
    return {spec, std::move(v)};
}

} // namespace catmap

#endif
