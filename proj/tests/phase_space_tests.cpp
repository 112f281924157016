#include <doctest.h>

#include <cmath>
#include <limits>

#include "bipartition/phase_space.hpp"
#include "support/test_support.hpp"

using namespace bipartition;
using test_support::max_abs;

TEST_CASE("symplectic form has the block structure [[0, I], [-I, 0]]") {
    const Matrix j = symplectic_form(2);
    Matrix expected(4, 4);
    expected << 0, 0, 1, 0,  //
        0, 0, 0, 1,          //
        -1, 0, 0, 0,         //
        0, -1, 0, 0;
    CHECK(max_abs(j - expected) == 0.0);
    CHECK(max_abs(j * j + Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("mode system validation") {
    CHECK_NOTHROW(ModeSystem::make({"a", "b"}, {1.0, 2.0}));
    CHECK_THROWS_AS(ModeSystem::make({"a", "a"}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSystem::make({"a", "b"}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSystem::make({"a"}, {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSystem::make({}, {}), std::invalid_argument);
}

TEST_CASE("canonicity residual separates symplectic from non-symplectic matrices") {
    CHECK(canonicity_residual(Matrix::Identity(4, 4)) == 0.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = test_support::random_symplectic(3, rng, 0.5);
        CHECK(canonicity_residual(s.S) < kCanonicalTol);
        CHECK(validate_symplectic(s));
    }

    Matrix stretch = Matrix::Identity(4, 4);
    stretch(0, 0) = 2.0;  // stretches x without shrinking p: not canonical
    CHECK(canonicity_residual(stretch) == doctest::Approx(1.0));
    CHECK_FALSE(validate_symplectic(make_transform(stretch)));
    CHECK_THROWS_AS(require_symplectic(make_transform(stretch)), validity_error);

    CHECK(canonicity_residual(Matrix::Identity(3, 3)) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("symplectic inverse is the exact group inverse") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = test_support::random_symplectic(2, rng, 0.6);
        s.d = Vector::Random(4);
        const auto inv = symplectic_inverse(s);
        const auto round = compose(inv, s);
        CHECK(max_abs(round.S - Matrix::Identity(4, 4)) < 1e-12);
        CHECK(round.d.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("composition applies the inner transform first") {
    const int n = 1;
    SymplecticTransform shift = identity_transform(n);
    shift.d << 1.0, 0.0;
    SymplecticTransform scale = make_transform((Matrix(2, 2) << 2, 0, 0, 0.5).finished());

    const auto both = compose(scale, shift);
    Vector z(2);
    z << 3.0, 4.0;
    const Vector expected = scale.S * (shift.S * z + shift.d) + scale.d;
    CHECK(max_abs((both.S * z + both.d) - expected) == 0.0);
}

TEST_CASE("point transforms extend with contragredient momenta") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = test_support::random_point_transform(3, rng);
        CHECK(canonicity_residual(s.S) < kCanonicalTol);
        CHECK(classify_division(s) == DivisionKind::point_like);
        // Momentum block is the inverse transpose of the position block.
        const Matrix t = s.S.topLeftCorner(3, 3);
        const Matrix u = s.S.bottomRightCorner(3, 3);
        CHECK(max_abs(t.transpose() * u - Matrix::Identity(3, 3)) < 1e-12);
    }
    CHECK_THROWS_AS(extend_point_transform(Matrix::Zero(2, 2)), validity_error);
}

TEST_CASE("two-body transform produces center-of-mass and relative coordinates") {
    const double m1 = 1.0;
    const double m2 = 1836.0;
    const auto s = two_body_transform(m1, m2);
    CHECK(canonicity_residual(s.S) < kCanonicalTol);

    // Positions: X = (m1 x1 + m2 x2)/M, x = x1 - x2.
    CHECK(s.S(0, 0) == doctest::Approx(m1 / (m1 + m2)).epsilon(1e-15));
    CHECK(s.S(0, 1) == doctest::Approx(m2 / (m1 + m2)).epsilon(1e-15));
    CHECK(s.S(1, 0) == doctest::Approx(1.0));
    CHECK(s.S(1, 1) == doctest::Approx(-1.0));
    // Momenta: P = p1 + p2, p = (m2 p1 - m1 p2)/M.
    CHECK(s.S(2, 2) == doctest::Approx(1.0));
    CHECK(s.S(2, 3) == doctest::Approx(1.0));
    CHECK(s.S(3, 2) == doctest::Approx(m2 / (m1 + m2)).epsilon(1e-15));
    CHECK(s.S(3, 3) == doctest::Approx(-m1 / (m1 + m2)).epsilon(1e-15));
    CHECK(max_abs(s.S.topRightCorner(2, 2)) == 0.0);

    CHECK_THROWS_AS(two_body_transform(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("division classification keys on the position-momentum mixing block") {
    CHECK(classify_division(identity_transform(2)) == DivisionKind::point_like);

    // x -> p, p -> -x: new positions are old momenta.
    const Matrix j = symplectic_form(2);
    CHECK(classify_division(make_transform(j)) == DivisionKind::complementary);

    std::mt19937_64 rng(14);
    int complementary_seen = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = test_support::random_symplectic(2, rng, 0.4);
        if (classify_division(s) == DivisionKind::complementary) ++complementary_seen;
    }
    CHECK(complementary_seen > 0);  // generic symplectics mix x and p
}

TEST_CASE("division specs must cover every mode exactly once") {
    CHECK_NOTHROW(DivisionSpec::make("ok", {{"a", {0}}, {"b", {1, 2}}}, 3));
    CHECK_THROWS_AS(DivisionSpec::make("overlap", {{"a", {0, 1}}, {"b", {1, 2}}}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(DivisionSpec::make("gap", {{"a", {0}}, {"b", {2}}}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(DivisionSpec::make("range", {{"a", {0}}, {"b", {3}}}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(DivisionSpec::make("single", {{"a", {0, 1}}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(DivisionSpec::make("empty", {{"a", {}}, {"b", {0, 1}}}, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(DivisionSpec::make("dup", {{"a", {0}}, {"a", {1}}}, 2),
                    std::invalid_argument);

    const auto spec = DivisionSpec::make("order", {{"second", {1}}, {"first", {0}}}, 2);
    CHECK(spec.parts[0].first == "second");  // declaration order preserved
    CHECK(spec.n_modes() == 2);
    CHECK(spec.is_bipartition());
}

TEST_CASE("position moments push forward and invert exactly through point transforms") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 40; ++trial) {
        auto s = test_support::random_point_transform(2, rng);
        s.d = Vector::Random(4);

        Vector mean = Vector::Random(2);
        Matrix cov = test_support::random_symmetric(2, rng, 1.0);
        cov = (cov * cov.transpose()).eval();  // positive semidefinite
        cov += 0.1 * Matrix::Identity(2, 2);

        const auto pushed = transform_position_moments(mean, cov, s);
        const auto back = invert_moments(pushed.mean, pushed.covariance, s);
        CHECK(max_abs(back.mean - mean) < 1e-12);
        CHECK(max_abs(back.covariance - cov) < 1e-12);
    }
}

TEST_CASE("moment inversion refuses complementary transforms") {
    const auto fourier = make_transform(symplectic_form(2));
    const Vector mean = Vector::Zero(2);
    const Matrix cov = Matrix::Identity(2, 2);
    CHECK_THROWS_WITH_AS(invert_moments(mean, cov, fourier),
                         doctest::Contains("complementary"), validity_error);
    CHECK_THROWS_AS(transform_position_moments(mean, cov, fourier), validity_error);
}
