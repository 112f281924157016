#include <doctest.h>

#include <cmath>

#include "bipartition/hamiltonian.hpp"
#include "support/test_support.hpp"

using namespace bipartition;
using test_support::max_abs;

namespace {

double energy(const QuadraticHamiltonian& h, const Vector& z) {
    return 0.5 * z.dot(h.M * z) + h.b.dot(z);
}

QuadraticHamiltonian coupled_pair() {
    Matrix v(2, 2);
    v << 1.0, 0.5,  //
        0.5, 1.0;
    return build_hamiltonian({1.0, 1.0}, v);
}

}  // namespace

TEST_CASE("mechanical Hamiltonians assemble as potential plus diagonal kinetic term") {
    const auto h = coupled_pair();
    CHECK(h.M(0, 0) == 1.0);
    CHECK(h.M(0, 1) == 0.5);
    CHECK(h.M(2, 2) == 1.0);
    CHECK(h.M(3, 3) == 1.0);
    CHECK(max_abs(h.M.topRightCorner(2, 2)) == 0.0);
    CHECK(h.b.cwiseAbs().maxCoeff() == 0.0);

    Matrix skew(2, 2);
    skew << 1.0, 0.3,  //
        -0.3, 1.0;
    CHECK_THROWS_AS(build_hamiltonian({1.0, 1.0}, skew), std::invalid_argument);
    CHECK_THROWS_AS(build_hamiltonian({1.0, -1.0}, Matrix::Identity(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("frame changes preserve the energy function") {
    std::mt19937_64 rng(21);
    auto h = coupled_pair();
    h.b = Vector::Random(4);

    for (int trial = 0; trial < 25; ++trial) {
        auto s = test_support::random_symplectic(2, rng, 0.5);
        s.d = Vector::Random(4);
        const auto moved = transform_hamiltonian(h, s);

        // H'(S z + d) - H(z) must be the same constant for every z.
        Vector z0 = Vector::Random(4);
        Vector z1 = Vector::Random(4);
        const double c0 = energy(moved, s.S * z0 + s.d) - energy(h, z0);
        const double c1 = energy(moved, s.S * z1 + s.d) - energy(h, z1);
        CHECK(std::abs(c0 - c1) < 1e-9);
    }
}

TEST_CASE("transforming forth and back returns the original Hamiltonian") {
    std::mt19937_64 rng(22);
    auto h = coupled_pair();
    h.b << 0.2, -0.1, 0.05, 0.3;
    auto s = test_support::random_symplectic(2, rng, 0.5);
    s.d = Vector::Random(4);

    const auto round = transform_hamiltonian(transform_hamiltonian(h, s), symplectic_inverse(s));
    CHECK(max_abs(round.M - h.M) < 1e-10);
    CHECK((round.b - h.b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("partition splits the Hamiltonian into self terms and coupling") {
    const auto h = coupled_pair();
    const auto division = DivisionSpec::make("pair", {{"left", {0}}, {"right", {1}}}, 2);
    const auto blocks = partition_blocks(h, division);

    CHECK(blocks.first_name == "left");
    CHECK(blocks.second_name == "right");
    CHECK(blocks.coupling_norm == 0.5);
    CHECK(blocks.self_first.M(0, 0) == 1.0);
    CHECK(blocks.self_first.M(2, 2) == 1.0);
    CHECK(max_abs(blocks.self_first.M.row(1)) == 0.0);
    CHECK(blocks.coupling.M(0, 1) == 0.5);
    CHECK(blocks.coupling.M(0, 0) == 0.0);

    const auto sum = reassemble(blocks);
    CHECK(max_abs(sum.M - h.M) == 0.0);
    CHECK((sum.b - h.b).cwiseAbs().maxCoeff() == 0.0);

    const auto three = DivisionSpec::make("three", {{"a", {0}}, {"b", {1}}, {"c", {2}}}, 3);
    CHECK_THROWS_AS(partition_blocks(build_hamiltonian({1, 1, 1}, Matrix::Identity(3, 3)), three),
                    validity_error);
}

TEST_CASE("coupling norm vanishes exactly for block-diagonal potentials") {
    Matrix v(3, 3);
    v << 2.0, 0.3, 0.0,  //
        0.3, 1.0, 0.0,   //
        0.0, 0.0, 4.0;
    const auto h = build_hamiltonian({1.0, 2.0, 3.0}, v);
    const auto division = DivisionSpec::make("split", {{"ab", {0, 1}}, {"c", {2}}}, 3);
    CHECK(partition_blocks(h, division).coupling_norm == 0.0);
}

TEST_CASE("normal modes of the coupled pair match the closed form") {
    const auto nm = normal_modes(coupled_pair());

    // omega = sqrt(1 +/- 0.5), descending.
    CHECK(nm.frequencies[0] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    CHECK(nm.frequencies[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    // Equal masses: profiles are the symmetric and antisymmetric combinations.
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(nm.participation(0, 0) == doctest::Approx(s));
    CHECK(nm.participation(1, 0) == doctest::Approx(s));
    CHECK(nm.participation(0, 1) == doctest::Approx(s));
    CHECK(nm.participation(1, 1) == doctest::Approx(-s));

    CHECK(classify_division(nm.to_normal) == DivisionKind::point_like);
    CHECK(canonicity_residual(nm.to_normal.S) < kCanonicalTol);

    // The normal frame decouples the Hamiltonian into unit oscillators.
    const auto moved = transform_hamiltonian(coupled_pair(), nm.to_normal);
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = nm.frequencies[0];
    expected(1, 1) = nm.frequencies[1];
    expected(2, 2) = nm.frequencies[0];
    expected(3, 3) = nm.frequencies[1];
    CHECK(max_abs(moved.M - expected) < 1e-12);
}

TEST_CASE("normal modes handle strongly unequal masses") {
    // Center mode in a shallow trap plus a unit-frequency relative mode.
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 3.400434248047675e-05;
    v(1, 1) = 1.0;
    const auto h = build_hamiltonian({1837.0, 0.9994556341861731}, v);
    const auto nm = normal_modes(h);

    CHECK(nm.frequencies[0] == doctest::Approx(1.0002722940826503).epsilon(1e-12));
    CHECK(nm.frequencies[1] == doctest::Approx(1.3605440664687444e-4).epsilon(1e-9));
    CHECK(classify_division(nm.to_normal) == DivisionKind::point_like);
}

TEST_CASE("uncoupled modes produce a permutation-with-scaling transform") {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = 0.25;
    v(1, 1) = 4.0;
    const auto nm = normal_modes(build_hamiltonian({1.0, 1.0}, v));
    CHECK(nm.frequencies[0] == doctest::Approx(2.0));
    CHECK(nm.frequencies[1] == doctest::Approx(0.5));

    // Each normal position reads exactly one lab position.
    const Matrix t = nm.to_normal.S.topLeftCorner(2, 2);
    for (int row = 0; row < 2; ++row) {
        int nonzero = 0;
        for (int col = 0; col < 2; ++col) {
            if (std::abs(t(row, col)) > 1e-12) ++nonzero;
        }
        CHECK(nonzero == 1);
    }
    CHECK(std::abs(t(0, 1)) > 0.0);  // the faster oscillator is mode 1 in the lab
}

TEST_CASE("normal modes refuse Hamiltonians without a stable frame") {
    Matrix v(2, 2);
    v << 1.0, -1.0,  //
        -1.0, 1.0;   // singular: free center-of-mass direction
    const auto h = build_hamiltonian({1.0, 1836.0}, v);
    CHECK_THROWS_WITH_AS(normal_modes(h), doctest::Contains("positive definite"),
                         validity_error);
}

TEST_CASE("general quadratic forms go through the symplectic diagonalization") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 15; ++trial) {
        // Random positive definite M with full x-p mixing.
        const Matrix r = test_support::random_symmetric(6, rng, 0.8);
        Matrix m = r * r.transpose() + 0.5 * Matrix::Identity(6, 6);
        QuadraticHamiltonian h{m, Vector::Zero(6)};

        const auto nm = normal_modes(h);
        CHECK(canonicity_residual(nm.to_normal.S) < kCanonicalTol);
        for (int i = 0; i + 1 < nm.frequencies.size(); ++i) {
            CHECK(nm.frequencies[i] >= nm.frequencies[i + 1]);
        }
        const auto moved = transform_hamiltonian(h, nm.to_normal);
        Matrix expected = Matrix::Zero(6, 6);
        for (int i = 0; i < 3; ++i) {
            expected(i, i) = nm.frequencies[i];
            expected(3 + i, 3 + i) = nm.frequencies[i];
        }
        CHECK(max_abs(moved.M - expected) < 1e-8);
    }
}

TEST_CASE("a nonzero linear term is absorbed into the normal frame's origin") {
    auto h = coupled_pair();
    h.b << 0.4, -0.2, 0.1, 0.3;
    const auto nm = normal_modes(h);
    const auto moved = transform_hamiltonian(h, nm.to_normal);
    CHECK(moved.b.cwiseAbs().maxCoeff() < 1e-12);
}
