#include <doctest.h>

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "bipartition/open_system.hpp"
#include "support/test_support.hpp"

using namespace bipartition;
using test_support::max_abs;

namespace {

QuadraticHamiltonian coupled_pair() {
    Matrix v(2, 2);
    v << 1.0, 0.5,  //
        0.5, 1.0;
    return build_hamiltonian({1.0, 1.0}, v);
}

NoiseSpec position_noise(std::vector<int> targets, double strength) {
    NoiseSpec noise;
    noise.target_modes = std::move(targets);
    const int k = static_cast<int>(noise.target_modes.size());
    noise.diffusion = strength * Matrix::Identity(2 * k, 2 * k);
    return noise;
}

DivisionFrame native_pair_frame() {
    return {DivisionSpec::make("pair", {{"left", {0}}, {"right", {1}}}, 2),
            identity_transform(2)};
}

}  // namespace

TEST_CASE("noise embeds onto the target modes' phase coordinates") {
    NoiseSpec noise;
    noise.target_modes = {1};
    noise.diffusion = Matrix(2, 2);
    noise.diffusion << 0.1, 0.05,  //
        0.05, 0.2;
    noise.damping = 0.3;

    const auto [gamma, d] = embed_noise(noise, 3);
    CHECK(d.rows() == 6);
    CHECK(d(1, 1) == 0.1);
    CHECK(d(1, 4) == 0.05);
    CHECK(d(4, 1) == 0.05);
    CHECK(d(4, 4) == 0.2);
    CHECK(d(0, 0) == 0.0);
    CHECK(d(2, 2) == 0.0);
    CHECK(gamma(1, 1) == 0.3);
    CHECK(gamma(4, 4) == 0.3);
    CHECK(gamma(0, 0) == 0.0);

    // Two targets listed back-to-front: coordinates follow target order.
    NoiseSpec pairwise;
    pairwise.target_modes = {2, 0};
    pairwise.diffusion = Matrix::Zero(4, 4);
    pairwise.diffusion(0, 0) = 0.1;
    pairwise.diffusion(1, 1) = 0.1;
    pairwise.diffusion(0, 1) = 0.07;
    pairwise.diffusion(1, 0) = 0.07;
    const auto [g2, d2] = embed_noise(pairwise, 3);
    CHECK(d2(2, 2) == 0.1);
    CHECK(d2(0, 0) == 0.1);
    CHECK(d2(2, 0) == 0.07);
    CHECK(d2(0, 2) == 0.07);

    NoiseSpec bad = position_noise({3}, 0.1);
    CHECK_THROWS_AS(embed_noise(bad, 3), std::invalid_argument);
    NoiseSpec negative = position_noise({0}, -0.1);
    CHECK_THROWS_AS(embed_noise(negative, 2), std::invalid_argument);
}

TEST_CASE("closed evolution reproduces the exact propagator") {
    const auto h = coupled_pair();
    // A squeezed, displaced ground state: pure but far from stationary.
    Matrix squeeze = Matrix::Identity(4, 4);
    squeeze(0, 0) = 1.4;
    squeeze(2, 2) = 1.0 / 1.4;
    auto state = apply_transform(ground_state(h), make_transform(squeeze));
    state.mean = Vector::Ones(4);

    NoiseSpec none;
    const double t = 2.0;
    const auto evolved = evolve(state, h, none, t);

    const Matrix a = symplectic_form(2) * h.M;
    const Matrix propagator = (a * t).exp();
    const Matrix exact_sigma = propagator * state.sigma * propagator.transpose();
    const Vector exact_mean = propagator * state.mean;

    CHECK(max_abs(evolved.sigma - exact_sigma) < 1e-9);
    CHECK((evolved.mean - exact_mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(is_pure(evolved));
}

TEST_CASE("the displaced ground state is a fixed point of the closed dynamics") {
    auto h = coupled_pair();
    h.b << 0.3, -0.2, 0.0, 0.1;
    const auto g = ground_state(h);
    NoiseSpec none;
    const auto later = evolve(g, h, none, 5.0);
    CHECK(max_abs(later.sigma - g.sigma) < 1e-10);
    CHECK((later.mean - g.mean).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("diffusion mixes the state and grows its entropy") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto noise = position_noise({0}, 0.1);

    const auto mid = evolve(g, h, noise, 1.0);
    const auto late = evolve(mid, h, noise, 1.0);

    CHECK(validity_margin(mid) > -kValidityTol);
    CHECK_FALSE(is_pure(late));
    CHECK(state_entropy(mid) > 0.0);
    CHECK(state_entropy(late) > state_entropy(mid));
}

TEST_CASE("undamped decay without diffusion cannot stay physical") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    NoiseSpec drain;
    drain.target_modes = {0, 1};
    drain.diffusion = Matrix::Zero(4, 4);
    drain.damping = 0.5;
    CHECK_THROWS_AS(evolve(g, h, drain, 4.0), numeric_error);
}

TEST_CASE("evolution rejects negative durations and mismatched noise") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    NoiseSpec none;
    CHECK_THROWS_AS(evolve(g, h, none, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(evolve(g, h, position_noise({5}, 0.1), 1.0), std::invalid_argument);
    CHECK(max_abs(evolve(g, h, none, 0.0).sigma - g.sigma) == 0.0);
}

TEST_CASE("the decoherence horizon matches the frozen reference run") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto noise = position_noise({0}, 0.1);
    const double t = decoherence_time(g, h, noise, native_pair_frame(), 20.0);
    CHECK(t == doctest::Approx(2.562255859).epsilon(0.01));
}

TEST_CASE("stronger noise shortens the decoherence horizon") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto frame = native_pair_frame();
    const double slow = decoherence_time(g, h, position_noise({0}, 0.05), frame, 20.0);
    const double base = decoherence_time(g, h, position_noise({0}, 0.1), frame, 20.0);
    const double fast = decoherence_time(g, h, position_noise({0}, 0.2), frame, 20.0);
    CHECK(slow > base);
    CHECK(base > fast);
    CHECK(fast > 0.0);
}

TEST_CASE("a horizon too short to see the crossing reports infinity") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto noise = position_noise({0}, 0.1);
    const double t = decoherence_time(g, h, noise, native_pair_frame(), 0.5);
    CHECK(t == std::numeric_limits<double>::infinity());
}

TEST_CASE("divisions without initial entanglement have no horizon to measure") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto nm = normal_modes(h);
    const DivisionFrame modes{
        DivisionSpec::make("modes", {{"high", {0}}, {"low", {1}}}, 2), nm.to_normal};
    CHECK_THROWS_WITH_AS(
        decoherence_time(g, h, position_noise({0}, 0.1), modes, 20.0),
        doctest::Contains("no entanglement to lose"), validity_error);
}

TEST_CASE("the shield search ranks untouched divisions first") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto noise = position_noise({0}, 0.1);
    const auto nm = normal_modes(h);

    std::vector<ShieldCandidate> candidates;
    candidates.push_back({native_pair_frame()});
    candidates.push_back({{DivisionSpec::make("modes", {{"high", {0}}, {"low", {1}}}, 2),
                           nm.to_normal}});

    const auto ranking = shielded_division_search(g, h, noise, candidates);
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].division_name == "modes");
    CHECK(ranking[0].initial_log_neg < 1e-12);
    CHECK(std::abs(ranking[0].degradation_rate) < 1e-6);
    CHECK(ranking[1].division_name == "pair");
    CHECK(ranking[1].initial_log_neg == doctest::Approx(std::log(3.0) / 4.0).epsilon(1e-10));
    CHECK(ranking[1].degradation_rate > 0.01);
}

TEST_CASE("shield ties keep declaration order") {
    const auto h = coupled_pair();
    const auto g = ground_state(h);
    const auto noise = position_noise({0}, 0.1);

    auto frame_a = native_pair_frame();
    frame_a.division = DivisionSpec::make("first", {{"left", {0}}, {"right", {1}}}, 2);
    auto frame_b = native_pair_frame();
    frame_b.division = DivisionSpec::make("second", {{"left", {0}}, {"right", {1}}}, 2);

    const auto ranking = shielded_division_search(g, h, noise, {{frame_a}, {frame_b}});
    REQUIRE(ranking.size() == 2);
    CHECK(ranking[0].division_name == "first");
    CHECK(ranking[1].division_name == "second");
}
