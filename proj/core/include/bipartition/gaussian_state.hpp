// Gaussian states: moments, validity, frame changes,
// reduction, ground and product-state preparation.

#pragma once

#include <vector>

#include "bipartition/hamiltonian.hpp"
#include "bipartition/phase_space.hpp"

namespace bipartition {

// Uncertainty floor: every symplectic eigenvalue of a physical covariance
// matrix is >= 1/2 (vacuum). Validity checks allow this much slack below.
inline constexpr double kValidityTol = 1e-6;

// ------------------------------ Gaussian state -------------------------------

/// Gaussian state of n modes: mean vector (2n) and covariance matrix (2n x 2n)
/// in the (x, p) ordering. sigma_ij = 1/2 <{z_i - <z_i>, z_j - <z_j>}>.
struct GaussianState {
    Vector mean;
    Matrix sigma;

    int n_modes() const { return static_cast<int>(mean.size()) / 2; }
};

/// Validating constructor: sigma symmetric, uncertainty relation
/// sigma + (i/2) J >= 0 satisfied within tol (min symplectic eigenvalue
/// >= 1/2 - tol). Throws validity_error otherwise.
GaussianState make_state(Vector mean, Matrix sigma, double tol = kValidityTol);

/// Symplectic eigenvalues of a covariance matrix, descending. Input must be
/// symmetric; positive definiteness is not required (partial transposes of
/// entangled states are handled too).
Vector symplectic_spectrum(const Matrix& sigma);

/// Minimum symplectic eigenvalue minus 1/2; negative means unphysical.
double validity_margin(const GaussianState& state);

/// Pure iff every symplectic eigenvalue equals 1/2 within tol.
bool is_pure(const GaussianState& state, double tol = kValidityTol);

// ------------------------------ frame changes --------------------------------

/// Push the state through zeta = S z + d:
///   mean' = S mean + d,  sigma' = S sigma S^T.
GaussianState apply_transform(const GaussianState& state, const SymplecticTransform& transform);

/// Marginal state of the listed modes (in the listed order). Gaussian
/// reduction is row/column selection of mean and sigma.
GaussianState reduce(const GaussianState& state, const std::vector<int>& modes);

// ----------------------------- state preparation -----------------------------

/// n-mode vacuum: mean 0, sigma = I/2.
GaussianState vacuum_state(int n_modes);

/// Ground state of a positive-definite quadratic Hamiltonian: the pure
/// stationary Gaussian with sigma = 1/2 (S_nm^T S_nm)^-1 built from the
/// normal-mode transform, mean = -M^-1 b. Throws validity_error when M is not
/// positive definite.
GaussianState ground_state(const QuadraticHamiltonian& h);

/// Single-mode pure wavepacket of position width w: sigma = diag(w^2, 1/(4 w^2)).
GaussianState wavepacket_mode(double width);

/// Width of the ground-state position marginal of a single mode with mass m
/// and frequency omega: 1/sqrt(2 m omega).
double ground_width(double mass, double omega);

/// Product preparation in the frame reached by `to_frame`: mode 0 (the
/// collective/center mode) is a pure wavepacket of width `center_width`, the
/// remaining modes sit in the ground state of their transformed self block.
/// Cross-covariances are zero by construction, so the prepared state is an
/// exact product across that frame's single-mode cut.
///
/// Requires the transformed Hamiltonian to carry no coupling between mode 0
/// and the rest: a coupled block has no well-defined "rest" ground state.
GaussianState prepare_product_center(const QuadraticHamiltonian& h,
                                     const SymplecticTransform& to_frame,
                                     double center_width);

}  // namespace bipartition
