// Entanglement and correlation measures across a division.
//
// All measures are computed from the covariance matrix alone; displacements
// never matter. Logarithms are natural throughout.

#pragma once

#include <string>
#include <vector>

#include "bipartition/gaussian_state.hpp"
#include "bipartition/phase_space.hpp"

namespace bipartition {

enum class Separability { separable, entangled, undecided };

const char* to_string(Separability s);

// ------------------------------ scalar measures ------------------------------

/// Entropy contribution of one symplectic eigenvalue:
/// f(nu) = (nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2), f(1/2) = 0.
double entropy_function(double nu);

/// Von Neumann entropy of a Gaussian state: sum of f over the symplectic
/// spectrum.
double state_entropy(const GaussianState& state);

/// Covariance matrix of the partial transpose: momenta of the listed modes
/// flip sign, sigma -> L sigma L.
Matrix partial_transpose(const Matrix& sigma, const std::vector<int>& modes, int n_modes);

/// Logarithmic negativity across `modes` vs the rest:
/// E_N = sum over partially transposed symplectic eigenvalues nu of
/// max(0, -ln(2 nu)).
double log_negativity(const GaussianState& state, const std::vector<int>& modes);

/// Entanglement entropy across a cut of a *pure* state: entropy of the
/// reduced state of `modes`. Throws validity_error for mixed inputs, where
/// the reduced entropy no longer measures entanglement.
double entanglement_entropy(const GaussianState& state, const std::vector<int>& modes,
                            double purity_tol = kValidityTol);

// ------------------------------ division report ------------------------------

/// Everything the library can say about one bipartition of one state.
struct EntanglementReport {
    std::string division_name;
    std::string first_name;
    std::string second_name;
    double log_neg = 0.0;
    double entropy_first = 0.0;        // reduced entropy of the first part
    double min_ppt_eigenvalue = 0.0;   // smallest symplectic eigenvalue after PPT
    bool pure = false;
    Separability separability = Separability::undecided;
};

/// Analyzes state across a two-part division. Separability is decided by the
/// positive-partial-transpose test where it is conclusive (1 x 1 and 1 x N
/// mode splits); larger splits report `undecided` whenever E_N = 0.
EntanglementReport analyze_division(const GaussianState& state, const DivisionSpec& division);

// ----------------------------- division compare ------------------------------

/// A division together with the transform that reaches its coordinates from
/// the frame the state lives in. Identity transform: division of the native
/// modes.
struct DivisionFrame {
    DivisionSpec division;
    SymplecticTransform to_frame;
};

/// One state, several candidate divisions: transforms the state into each
/// frame and analyzes it there. Order of results follows the input order.
std::vector<EntanglementReport> compare_divisions(const GaussianState& state,
                                                  const std::vector<DivisionFrame>& frames);

}  // namespace bipartition
