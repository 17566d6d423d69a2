#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chipower/procrustes.hpp"
#include "support/oracles.hpp"

using namespace coda;

TEST_CASE("identical configurations give r = 1, E = 0") {
    const auto f = oracles::random_gaussian(12, 4, 100);
    const auto fit = procrustes_fit(f, f);
    CHECK(fit.correlation == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.error == Catch::Approx(0.0).margin(1e-12));
    CHECK(fit.points == 12);
    CHECK(fit.dims == 4);
}

TEST_CASE("matched transformations leave the correlation at 1") {
    const auto f = oracles::random_gaussian(15, 3, 7);
    const auto rot = oracles::random_rotation(3, 8);
    Eigen::MatrixXd g = 2.7 * f * rot;
    g.rowwise() += Eigen::RowVector3d{5.0, -3.0, 0.25};
    CHECK(procrustes_correlation(f, g) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("rotation matrix is orthogonal and error maps to the correlation") {
    const auto f1 = oracles::random_gaussian(20, 5, 1);
    const auto f2 = oracles::random_gaussian(20, 5, 2);
    const auto fit = procrustes_fit(f1, f2);
    CHECK((fit.rotation.transpose() * fit.rotation - Eigen::MatrixXd::Identity(5, 5))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(fit.correlation == Catch::Approx(std::sqrt(1.0 - fit.error)).margin(1e-12));
    CHECK(fit.error >= 0.0);
    CHECK(fit.error <= 1.0);
    CHECK(fit.correlation >= 0.0);
    CHECK(fit.correlation <= 1.0);
}

TEST_CASE("correlation equals the vectorized Pearson oracle") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto f1 = oracles::random_gaussian(10, 3, 1000 + seed);
        const auto f2 = oracles::random_gaussian(10, 3, 2000 + seed);
        const auto fit = procrustes_fit(f1, f2);
        // oracle: center, normalize, rotate, then plain Pearson of the vecs
        Eigen::MatrixXd a = f1.rowwise() - f1.colwise().mean();
        Eigen::MatrixXd b = f2.rowwise() - f2.colwise().mean();
        a /= a.norm();
        b /= b.norm();
        const double pearson = oracles::vectorized_pearson(a, b * fit.rotation);
        CHECK(fit.correlation == Catch::Approx(pearson).margin(1e-10));
    }
}

TEST_CASE("the correlation is symmetric in its arguments") {
    const auto f1 = oracles::random_gaussian(9, 4, 31);
    const auto f2 = oracles::random_gaussian(9, 4, 32);
    CHECK(procrustes_correlation(f1, f2) ==
          Catch::Approx(procrustes_correlation(f2, f1)).margin(1e-10));
}

TEST_CASE("invariance under translation, rotation and positive scaling") {
    const auto f1 = oracles::random_gaussian(14, 3, 61);
    const auto f2 = oracles::random_gaussian(14, 3, 62);
    const double base = procrustes_correlation(f1, f2);

    Eigen::MatrixXd shifted = f2;
    shifted.rowwise() += Eigen::RowVector3d{/*dx=*/9.0, -2.0, 4.5};
    CHECK(procrustes_correlation(f1, shifted) == Catch::Approx(base).margin(1e-10));

    CHECK(procrustes_correlation(f1, (0.031 * f2).eval()) == Catch::Approx(base).margin(1e-10));

    const auto rot = oracles::random_rotation(3, 63);
    CHECK(procrustes_correlation(f1, (f2 * rot).eval()) == Catch::Approx(base).margin(1e-10));
    CHECK(procrustes_correlation((f1 * rot).eval(), f2) == Catch::Approx(base).margin(1e-10));
}

TEST_CASE("narrower configurations are zero-padded") {
    const auto f = oracles::random_gaussian(10, 3, 90);
    Eigen::MatrixXd wide(10, 5);
    wide.leftCols(3) = f;
    wide.rightCols(2).setZero();
    const auto fit = procrustes_fit(f, wide);
    CHECK(fit.dims == 5);
    CHECK(fit.correlation == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("a mirrored configuration still matches (reflections allowed)") {
    const auto f = oracles::random_gaussian(11, 3, 77);
    Eigen::MatrixXd mirrored = f;
    mirrored.col(0) = -mirrored.col(0);
    CHECK(procrustes_correlation(f, mirrored) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("degenerate inputs are rejected") {
    const auto f = oracles::random_gaussian(5, 2, 3);
    CHECK_THROWS_AS(procrustes_fit(f, oracles::random_gaussian(6, 2, 4)), data_error);
    CHECK_THROWS_AS(procrustes_fit(f, Eigen::MatrixXd::Zero(5, 2)), data_error);
    CHECK_THROWS_AS(procrustes_fit(f, Eigen::MatrixXd::Ones(5, 2)), data_error); // zero after centering
    CHECK_THROWS_AS(procrustes_fit(Eigen::MatrixXd(5, 0), f), data_error);
}
