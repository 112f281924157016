// Gaussian open-system dynamics and division robustness.
//
// Dynamics model: quadratic Hamiltonian drift plus mode-local damping and
// diffusion,
//   d sigma/dt = A sigma + sigma A^T + D,   d mean/dt = A mean + J b,
// with A = J M - Gamma. Gamma and D act on selected target modes only.

#pragma once

#include <string>
#include <vector>

#include "bipartition/entanglement.hpp"
#include "bipartition/gaussian_state.hpp"
#include "bipartition/hamiltonian.hpp"

namespace bipartition {

// ------------------------------- noise model ---------------------------------

/// Noise acting on a subset of modes, expressed in the same frame as the
/// Hamiltonian. `diffusion` is a 2k x 2k symmetric positive semidefinite
/// matrix over the target modes' phase coordinates (positions first, then
/// momenta, in target order). `damping` >= 0 applies -damping * I on those
/// coordinates.
struct NoiseSpec {
    std::vector<int> target_modes;
    Matrix diffusion;
    double damping = 0.0;
};

/// Embeds the noise into full 2n x 2n drift/diffusion contributions.
/// Returns {Gamma, D}.
std::pair<Matrix, Matrix> embed_noise(const NoiseSpec& noise, int n_modes);

// -------------------------------- evolution ----------------------------------

struct EvolveOptions {
    double dt = 1e-3;              // base RK4 step
    double validity_tol = kValidityTol;
    int max_halvings = 12;         // step refinement before giving up
};

/// Evolves state for duration t under h plus noise. Fixed-step RK4 on the
/// moment equations; a step that lands outside the physical cone (validity
/// margin below -validity_tol) is retried at half size. Throws numeric_error
/// when halving bottoms out, validity_error for malformed inputs.
GaussianState evolve(const GaussianState& state, const QuadraticHamiltonian& h,
                     const NoiseSpec& noise, double t, const EvolveOptions& options = {});

// ---------------------------- decoherence horizon ----------------------------

/// First time at which the log negativity across `division` falls below 1/e of
/// its initial value. Evolution runs in the native frame; the measure is taken
/// in the division's own frame at each sample. Coarse scan over [0, horizon]
/// (resolution horizon/32) followed by bisection to relative precision 1e-3.
/// Returns +infinity when no crossing occurs within the horizon. Throws
/// validity_error when the division carries no entanglement to lose
/// (E_N(0) = 0).
double decoherence_time(const GaussianState& state, const QuadraticHamiltonian& h,
                        const NoiseSpec& noise, const DivisionFrame& division, double horizon,
                        const EvolveOptions& options = {});

// ------------------------------ shield search --------------------------------

/// Candidate division for robustness ranking.
struct ShieldCandidate {
    DivisionFrame frame;
};

/// One row of the ranking: how fast the division loses entanglement under the
/// given noise, measured as (E_N(0) - E_N(dt)) / dt over a single step.
struct ShieldRanking {
    std::string division_name;
    double initial_log_neg = 0.0;
    double degradation_rate = 0.0;
};

/// Ranks candidate divisions by degradation rate, ascending: the division
/// whose entanglement the noise touches least comes first. Ties keep
/// declaration order.
std::vector<ShieldRanking> shielded_division_search(const GaussianState& state,
                                                    const QuadraticHamiltonian& h,
                                                    const NoiseSpec& noise,
                                                    const std::vector<ShieldCandidate>& candidates,
                                                    const EvolveOptions& options = {});

}  // namespace bipartition
