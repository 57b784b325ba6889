#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "catmap/hilbert.hpp"

using namespace catmap;

TEST_CASE("inner product basics") {
    const HilbertSpec spec(8);
    const StateVector e2 = StateVector::basis(spec, 2);
    const StateVector e5 = StateVector::basis(spec, 5);
    CHECK(inner_product(e2, e2).real() == doctest::Approx(1.0 / 8.0));
    CHECK(std::abs(inner_product(e2, e5)) == doctest::Approx(0.0));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    VectorXcd v(8);
    for (int k = 0; k < 8; ++k) v(k) = Complex(g(rng), g(rng));
    const StateVector f{spec, v};
    const Complex self = inner_product(f, f);
    CHECK(self.real() >= 0.0);
    CHECK(std::abs(self.imag()) <= 1e-14);
    CHECK_THROWS_AS(inner_product(f, StateVector::basis(HilbertSpec(9), 0)),
                    DimensionMismatch);
}

TEST_CASE("translation_apply: shift, modulation, identity") {
    const HilbertSpec spec(4);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    VectorXcd v(4);
    for (int k = 0; k < 4; ++k) v(k) = Complex(g(rng), g(rng));
    const StateVector psi{spec, v};

    const StateVector shifted = translation_apply(1, 0, psi);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(shifted.amplitudes(k) - v((k + 3) % 4)) <= 1e-14);

    const StateVector modulated = translation_apply(0, 1, psi);
    for (int k = 0; k < 4; ++k) {
        const Complex expect = std::polar(1.0, 2.0 * std::numbers::pi * k / 4.0) * v(k);
        CHECK(std::abs(modulated.amplitudes(k) - expect) <= 1e-14);
    }

    const StateVector same = translation_apply(0, 0, psi);
    CHECK((same.amplitudes - v).norm() <= 1e-15);
}

TEST_CASE("translation_matrix: identity, Weyl commutation, unitarity") {
    const HilbertSpec spec(16);
    CHECK((translation_matrix(0, 0, spec) - MatrixXcd::Identity(16, 16)).norm() == 0.0);

    const MatrixXcd t10 = translation_matrix(1, 0, spec);
    const MatrixXcd t01 = translation_matrix(0, 1, spec);
    const Complex omega = std::polar(1.0, -2.0 * std::numbers::pi / 16.0);
    CHECK((t10 * t01 - omega * (t01 * t10)).cwiseAbs().maxCoeff() <= 1e-12);

    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::int64_t> li(-64, 64);
    for (int trial = 0; trial < 5; ++trial) {
        const HilbertSpec big(509);
        const MatrixXcd t = translation_matrix(li(rng), li(rng), big);
        CHECK((t * t.adjoint() - MatrixXcd::Identity(509, 509)).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("translation matrix columns equal translation_apply") {
    const HilbertSpec spec(7);
    const MatrixXcd t = translation_matrix(3, 5, spec);
    for (int j = 0; j < 7; ++j) {
        const StateVector col = translation_apply(3, 5, StateVector::basis(spec, j));
        CHECK((t.col(j) - col.amplitudes).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("periodicity and group law up to unimodular phase") {
    const HilbertSpec spec(11);
    const MatrixXcd a = translation_matrix(3 + 11, 4, spec);
    const MatrixXcd b = translation_matrix(3, 4, spec);
    // find the global scalar from a reference entry and compare
    Complex ratio = 0;
    for (int j = 0; j < 11 && ratio == Complex(0); ++j)
        if (std::abs(b(( (3 % 11) + j) % 11, j)) > 0.5)
            ratio = a(((3 % 11) + j) % 11, j) / b(((3 % 11) + j) % 11, j);
    CHECK(std::abs(std::abs(ratio) - 1.0) <= 1e-12);
    CHECK((a - ratio * b).cwiseAbs().maxCoeff() <= 1e-12);

    const MatrixXcd lhs = translation_matrix(2, 5, spec) * translation_matrix(4, -3, spec);
    const MatrixXcd rhs = translation_matrix(6, 2, spec);
    // lhs = phase * rhs; read the phase off the largest entry
    Eigen::Index r = 0, c = 0;
    rhs.cwiseAbs().maxCoeff(&r, &c);
    const Complex phase = lhs(r, c) / rhs(r, c);
    CHECK(std::abs(std::abs(phase) - 1.0) <= 1e-12);
    CHECK((lhs - phase * rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("serialization round trips") {
    const HilbertSpec spec(5);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    VectorXcd v(5);
    for (int k = 0; k < 5; ++k) v(k) = Complex(g(rng), g(rng));
    const StateVector psi{spec, v};

    const StateVector via_json = state_from_json(state_to_json(psi));
    CHECK((via_json.amplitudes - v).norm() == 0.0);

    std::stringstream buf;
    state_write_binary(psi, buf);
    const StateVector via_bin = state_read_binary(buf);
    CHECK(via_bin.spec.N == 5);
    CHECK((via_bin.amplitudes - v).norm() == 0.0);
}
