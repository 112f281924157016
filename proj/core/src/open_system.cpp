#include "bipartition/open_system.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace bipartition {

namespace {

constexpr double kSymmetryTol = 1e-10;

struct Moments {
    Vector mean;
    Matrix sigma;
};

// One RK4 step of the linear moment equations. A, D, and the drive J b are
// constant, so classical RK4 keeps the O(dt^4) order exactly.
Moments rk4_step(const Moments& y, const Matrix& a, const Matrix& d, const Vector& drive,
                 double dt) {
    const auto f_sigma = [&](const Matrix& s) -> Matrix {
        return a * s + s * a.transpose() + d;
    };
    const auto f_mean = [&](const Vector& m) -> Vector { return a * m + drive; };

    const Matrix k1 = f_sigma(y.sigma);
    const Vector l1 = f_mean(y.mean);
    const Matrix k2 = f_sigma(y.sigma + 0.5 * dt * k1);
    const Vector l2 = f_mean(y.mean + 0.5 * dt * l1);
    const Matrix k3 = f_sigma(y.sigma + 0.5 * dt * k2);
    const Vector l3 = f_mean(y.mean + 0.5 * dt * l2);
    const Matrix k4 = f_sigma(y.sigma + dt * k3);
    const Vector l4 = f_mean(y.mean + dt * l3);

    Moments out;
    out.sigma = y.sigma + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    out.mean = y.mean + (dt / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    return out;
}

bool physical(const Matrix& sigma, double tol) {
    return symplectic_spectrum(sigma).minCoeff() >= 0.5 - tol;
}

double measure_log_neg(const GaussianState& state, const DivisionFrame& frame) {
    const GaussianState moved = apply_transform(state, frame.to_frame);
    if (!frame.division.is_bipartition()) {
        throw validity_error("entanglement tracking is defined for two-part divisions only");
    }
    return log_negativity(moved, frame.division.part_modes(0));
}

}  // namespace

// ------------------------------- noise model ---------------------------------

std::pair<Matrix, Matrix> embed_noise(const NoiseSpec& noise, int n_modes) {
    const int k = static_cast<int>(noise.target_modes.size());
    if (k == 0) {
        // No targets: free evolution.
        return {Matrix::Zero(2 * n_modes, 2 * n_modes), Matrix::Zero(2 * n_modes, 2 * n_modes)};
    }
    std::set<int> seen;
    for (int m : noise.target_modes) {
        if (m < 0 || m >= n_modes) {
            throw std::invalid_argument("noise targets a mode outside the system");
        }
        if (!seen.insert(m).second) {
            throw std::invalid_argument("noise lists a target mode twice");
        }
    }
    if (noise.diffusion.rows() != 2 * k || noise.diffusion.cols() != 2 * k) {
        throw std::invalid_argument("diffusion matrix must be 2k x 2k over the target modes");
    }
    const double scale = std::max(1.0, noise.diffusion.cwiseAbs().maxCoeff());
    if ((noise.diffusion - noise.diffusion.transpose()).cwiseAbs().maxCoeff() >
        kSymmetryTol * scale) {
        throw std::invalid_argument("diffusion matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(noise.diffusion);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
        throw std::invalid_argument("diffusion matrix must be positive semidefinite");
    }
    if (!(noise.damping >= 0.0) || !std::isfinite(noise.damping)) {
        throw std::invalid_argument("damping must be nonnegative and finite");
    }

    // Target phase coordinates, positions first then momenta, in target order.
    std::vector<int> idx(2 * k);
    for (int i = 0; i < k; ++i) {
        idx[i] = noise.target_modes[i];
        idx[k + i] = n_modes + noise.target_modes[i];
    }
    Matrix gamma = Matrix::Zero(2 * n_modes, 2 * n_modes);
    Matrix diffusion = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int i = 0; i < 2 * k; ++i) {
        gamma(idx[i], idx[i]) = noise.damping;
        for (int j = 0; j < 2 * k; ++j) {
            diffusion(idx[i], idx[j]) = noise.diffusion(i, j);
        }
    }
    return {std::move(gamma), std::move(diffusion)};
}

// -------------------------------- evolution ----------------------------------

GaussianState evolve(const GaussianState& state, const QuadraticHamiltonian& h,
                     const NoiseSpec& noise, double t, const EvolveOptions& options) {
    if (h.M.rows() != state.mean.size()) {
        throw std::invalid_argument("Hamiltonian and state mode counts differ");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("evolution time must be nonnegative and finite");
    }
    if (!(options.dt > 0.0)) {
        throw std::invalid_argument("evolution step must be positive");
    }
    if (t == 0.0) {
        return state;
    }
    const int n = state.n_modes();
    const auto [gamma, diffusion] = embed_noise(noise, n);
    const Matrix j = symplectic_form(n);
    const Matrix a = j * h.M - gamma;
    const Vector drive = j * h.b;

    Moments y{state.mean, state.sigma};
    double remaining = t;
    double dt = options.dt;
    int halvings = 0;
    while (remaining > 1e-15 * t) {
        const double step = std::min(dt, remaining);
        Moments trial = rk4_step(y, a, diffusion, drive, step);
        if (!trial.sigma.allFinite() || !trial.mean.allFinite()) {
            throw numeric_error("evolution diverged; moments are no longer finite");
        }
        if (!physical(trial.sigma, options.validity_tol)) {
            ++halvings;
            if (halvings > options.max_halvings) {
                throw numeric_error(
                    "evolution left the physical cone and step refinement bottomed out; the "
                    "noise model is not a valid quantum channel on this state");
            }
            dt *= 0.5;
            continue;
        }
        y = std::move(trial);
        remaining -= step;
    }
    return GaussianState{std::move(y.mean), std::move(y.sigma)};
}

// ---------------------------- decoherence horizon ----------------------------

double decoherence_time(const GaussianState& state, const QuadraticHamiltonian& h,
                        const NoiseSpec& noise, const DivisionFrame& division, double horizon,
                        const EvolveOptions& options) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("search horizon must be positive and finite");
    }
    const double initial = measure_log_neg(state, division);
    if (initial <= 0.0) {
        throw validity_error("division carries no entanglement to lose");
    }
    const double target = initial / std::exp(1.0);

    // Coarse scan, evolving incrementally from sample to sample.
    constexpr int kSamples = 32;
    const double coarse = horizon / kSamples;
    GaussianState at_left = state;
    double t_left = 0.0;
    double t_right = 0.0;
    bool crossed = false;
    for (int i = 1; i <= kSamples; ++i) {
        GaussianState next = evolve(at_left, h, noise, coarse, options);
        const double value = measure_log_neg(next, division);
        t_right = i * coarse;
        if (value < target) {
            crossed = true;
            break;
        }
        at_left = std::move(next);
        t_left = t_right;
    }
    if (!crossed) {
        return std::numeric_limits<double>::infinity();
    }

    // Bisect inside the bracketing interval; evolve from the cached left state.
    double lo = t_left;
    double hi = t_right;
    while ((hi - lo) > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        const GaussianState probe = evolve(at_left, h, noise, mid - t_left, options);
        if (measure_log_neg(probe, division) < target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// ------------------------------ shield search --------------------------------

std::vector<ShieldRanking> shielded_division_search(const GaussianState& state,
                                                    const QuadraticHamiltonian& h,
                                                    const NoiseSpec& noise,
                                                    const std::vector<ShieldCandidate>& candidates,
                                                    const EvolveOptions& options) {
    if (candidates.empty()) {
        throw std::invalid_argument("shield search needs at least one candidate division");
    }
    const GaussianState after = evolve(state, h, noise, options.dt, options);

    std::vector<ShieldRanking> rows;
    rows.reserve(candidates.size());
    for (const auto& candidate : candidates) {
        ShieldRanking row;
        row.division_name = candidate.frame.division.name;
        row.initial_log_neg = measure_log_neg(state, candidate.frame);
        const double later = measure_log_neg(after, candidate.frame);
        row.degradation_rate = (row.initial_log_neg - later) / options.dt;
        rows.push_back(std::move(row));
    }
    // Ascending degradation: the best-shielded division first. Stable, so ties
    // keep declaration order.
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        return x.degradation_rate < y.degradation_rate;
    });
    return rows;
}

}  // namespace bipartition
