#include <doctest.h>

#include <cmath>
#include <random>

#include "catmap/classical.hpp"

using namespace catmap;

TEST_CASE("validate_map accepts the standard example") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    CHECK(m.lambda_u == doctest::Approx(2.0 + std::sqrt(3.0)).epsilon(1e-12));
    CHECK(m.lambda_s == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-12));
    CHECK(m.lambda_u * m.lambda_s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validate_map rejections") {
    CHECK_THROWS_AS(validate_map({1, 0, 0, 1}), NotHyperbolic);
    CHECK_THROWS_AS(validate_map({1, 1, 1, 2}), NotInGamma2);
    CHECK_THROWS_AS(validate_map({2, 0, 0, 2}), NotUnimodular);
}

TEST_CASE("iota diagonalizes the map") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    const Matrix2d d = m.iota_inv * m.real() * m.iota;
    CHECK(std::abs(d(0, 0) - m.lambda_u) <= 1e-10);
    CHECK(std::abs(d(1, 1) - m.lambda_s) <= 1e-10);
    CHECK(std::abs(d(0, 1)) <= 1e-10);
    CHECK(std::abs(d(1, 0)) <= 1e-10);
    CHECK(std::abs(m.iota.determinant() - 1.0) <= 1e-12);
}

TEST_CASE("apply_map basics") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    const TorusPoint origin = apply_map(m, {0, 0}, 5);
    CHECK(origin.x() == doctest::Approx(0.0));
    CHECK(origin.y() == doctest::Approx(0.0));

    const TorusPoint half = apply_map(m, {0.5, 0.5}, 1);
    CHECK(half.x() == doctest::Approx(0.5));
    CHECK(half.y() == doctest::Approx(0.5));

    const TorusPoint p(0.137, 0.642);
    const TorusPoint back = apply_map(m, apply_map(m, p, 1), -1);
    CHECK(std::abs(back.x() - p.x()) <= 1e-12);
    CHECK(std::abs(back.y() - p.y()) <= 1e-12);
}

TEST_CASE("shortest_cell_basis for the standard example") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    const LatticeCell cell = shortest_cell_basis(m, 0.05);
    CHECK(cell.nm[0] == 0);
    CHECK(cell.nm[1] == 1);
    CHECK(cell.P.x() == doctest::Approx(0.5373).epsilon(1e-3));
    CHECK(cell.P.y() == doctest::Approx(0.5373).epsilon(1e-3));
    CHECK(cell.P.norm() == doctest::Approx(0.7599).epsilon(1e-3));
    CHECK(cell.nm[0] * cell.kl[1] - cell.kl[0] * cell.nm[1] == 1);
    const double det = cell.P.x() * cell.Pprime.y() - cell.P.y() * cell.Pprime.x();
    CHECK(std::abs(std::abs(det) - 1.0) <= 1e-12);
    // Minkowski ellipse y^2/4 + eta^2 <= 1
    CHECK(cell.P.x() * cell.P.x() / 4.0 + cell.P.y() * cell.P.y() <= 1.0 + 1e-12);
    CHECK_THROWS_AS(shortest_cell_basis(m, 10.0), KappaTooLarge);
}

TEST_CASE("random maps: Minkowski point and diagonalization") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const HyperbolicMap m = random_gamma2_map(rng);
        const LatticeCell cell = shortest_cell_basis(m, 1e-4);
        CHECK(cell.P.x() * cell.P.x() / 4.0 + cell.P.y() * cell.P.y() <= 1.0 + 1e-9);
        const Matrix2d d = m.iota_inv * m.real() * m.iota;
        CHECK(std::abs(d(0, 1)) <= 1e-10);
        CHECK(std::abs(d(1, 0)) <= 1e-10);
    }
}

TEST_CASE("orbit cover: covering balls are immediate") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    const OrbitCover c = unstable_orbit_cover(m, {0.25, 0.25}, {0.75, 0.75}, 2.0, 10.0, 5);
    CHECK(c.L == doctest::Approx(c.ell));
}

TEST_CASE("orbit cover: standard geometry terminates and is monotone") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    const OrbitCover wide = unstable_orbit_cover(m, {0.25, 0.25}, {0.75, 0.75}, 0.5, 400.0, 12);
    const OrbitCover narrow = unstable_orbit_cover(m, {0.25, 0.25}, {0.75, 0.75}, 0.4, 400.0, 12);
    CHECK(wide.L > 0);
    CHECK(narrow.L + 1e-9 >= wide.L);
}

TEST_CASE("unstable orbit comes close to random targets") {
    const HyperbolicMap m = validate_map({2, 1, 3, 2});
    const Vector2d dir = m.v_u.normalized();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<TorusPoint> targets;
    for (int i = 0; i < 100; ++i) targets.push_back({uni(rng), uni(rng)});
    std::vector<char> hit(targets.size(), 0);
    std::size_t remaining = targets.size();
    const double dt = 1e-3;
    double L_dense = 0;
    for (std::int64_t step = 0; step < 2000000 && remaining > 0; ++step) {
        const TorusPoint p = wrap_torus(step * dt * dir);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (!hit[i] && torus_dist(p, targets[i]) < 0.05) {
                hit[i] = 1;
                --remaining;
                L_dense = step * dt;
            }
        }
    }
    CHECK(remaining == 0);
    CHECK(L_dense > 0);
}
