#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "catmap/propagator.hpp"

using namespace catmap;

TEST_CASE("kernel matches the explicit small case") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});
    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(3));
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            const Complex expect =
                std::polar(1.0 / std::sqrt(3.0),
                           2.0 * std::numbers::pi * ((k * k - k * j + j * j) % 3) / 3.0);
            CHECK(std::abs(qcm.matrix(j, k) - expect) <= 1e-14);
        }
    }
}

TEST_CASE("unitarity and unsupported dimensions") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});
    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(101));
    CHECK(qcm.unitarity <= 1e-11);
    CHECK_THROWS_AS(build_cat_matrix(map, HilbertSpec(100)), UnsupportedN);
}

TEST_CASE("exact Egorov defect") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});
    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(51));
    CHECK(egorov_defect(qcm, TorusSymbol::constant(1.0)) <= 1e-13);
    CHECK(egorov_defect(qcm, TorusSymbol::cosine(0, 1)) <= 1e-9);
    for (const auto l : {std::pair<std::int64_t, std::int64_t>{3, -2},
                         std::pair<std::int64_t, std::int64_t>{-5, 7},
                         std::pair<std::int64_t, std::int64_t>{8, 8}}) {
        const TorusSymbol mode = TorusSymbol::cosine(l.first, l.second);
        CHECK(egorov_defect(qcm, mode) <= 1e-9);
        CHECK(egorov_defect(qcm, mode, 3) <= 3e-9);
    }
}

TEST_CASE("Egorov pins the general-map kernel convention") {
    for (const IntMat2 entries : {IntMat2{2, 3, 1, 2}, IntMat2{7, 4, 12, 7}}) {
        const HyperbolicMap map = validate_map(entries);
        const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(101));
        CHECK(qcm.unitarity <= 1e-11);
        CHECK(egorov_defect(qcm, TorusSymbol::cosine(1, 2)) <= 1e-9);
    }
}

TEST_CASE("eigendecomposition") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});

    const QuantumCatMap tiny = build_cat_matrix(map, HilbertSpec(1));
    const SpectralData sd1 = eigendecompose(tiny);
    CHECK(std::abs(sd1.eigenvalues(0) - tiny.matrix(0, 0)) <= 1e-12);

    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(101));
    const SpectralData sd = eigendecompose(qcm);
    for (int j = 0; j < 101; ++j) CHECK(std::abs(std::abs(sd.eigenvalues(j)) - 1.0) <= 1e-10);
    const MatrixXcd gram = sd.eigenvectors.adjoint() * sd.eigenvectors;
    CHECK((gram - MatrixXcd::Identity(101, 101)).cwiseAbs().maxCoeff() <= 1e-9);
    const MatrixXcd rebuilt =
        sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.adjoint();
    CHECK((rebuilt - qcm.matrix).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("deterministic tie-break is reproducible") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});
    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(41));
    const SpectralData a = eigendecompose(qcm);
    const SpectralData b = eigendecompose(qcm);
    CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quantum period") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});
    const QuantumCatMap tiny = build_cat_matrix(map, HilbertSpec(1));
    CHECK(quantum_period(tiny, 4) == 1);

    const QuantumCatMap five = build_cat_matrix(map, HilbertSpec(5));
    const std::int64_t period = quantum_period(five, 64);
    // brute force: repeated multiplication
    MatrixXcd p = MatrixXcd::Identity(5, 5);
    std::int64_t brute = -1;
    for (std::int64_t q = 1; q <= 64 && brute < 0; ++q) {
        p = five.matrix * p;
        MatrixXcd diff = p;
        diff.diagonal().array() -= p(0, 0);
        if (std::abs(std::abs(p(0, 0)) - 1.0) <= 1e-8 && max_abs(diff) <= 1e-8) brute = q;
    }
    CHECK(period == brute);

    // eigenphases must sit on the lattice of P-th roots of a common zeta
    const SpectralData sd = eigendecompose(five);
    MatrixXcd mp = MatrixXcd::Identity(5, 5);
    for (std::int64_t q = 0; q < period; ++q) mp = five.matrix * mp;
    const Complex zeta = mp(0, 0);
    for (int j = 0; j < 5; ++j)
        CHECK(std::abs(std::pow(sd.eigenvalues(j), static_cast<double>(period)) - zeta) <= 1e-7);
}

TEST_CASE("matrix dump round trip") {
    const HyperbolicMap map = validate_map({2, 1, 3, 2});
    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(9));
    std::stringstream buf;
    dump_matrix(qcm.matrix, buf);
    const MatrixXcd back = load_matrix(buf);
    CHECK((back - qcm.matrix).cwiseAbs().maxCoeff() == 0.0);
}
