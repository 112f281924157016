// Quadratic Hamiltonians, frame changes, structural split,
// normal modes.

#pragma once

#include <string>
#include <vector>

#include "bipartition/phase_space.hpp"

namespace bipartition {

// ---------------------------- quadratic Hamiltonian --------------------------

/// H(z) = 1/2 z^T M z + b^T z with z = (x, p). M is symmetric 2n x 2n.
/// Constant offsets are dropped throughout: they move no moments.
struct QuadraticHamiltonian {
    Matrix M;
    Vector b;

    int n_modes() const { return static_cast<int>(M.rows()) / 2; }
};

/// Standard mechanical form: kinetic sum p_i^2 / (2 m_i) plus potential
/// 1/2 x^T V x. V must be symmetric.
QuadraticHamiltonian build_hamiltonian(const std::vector<double>& masses, const Matrix& potential);

/// Rewrite H in the frame zeta = S z + d:
///   M' = S^-T M S^-1,  b' = S^-T b - M' d.
QuadraticHamiltonian transform_hamiltonian(const QuadraticHamiltonian& h,
                                           const SymplecticTransform& transform);

// ---------------------------- structural split -------------------------------

/// H = H_first + H_second + H_coupling relative to a two-part division.
/// The self terms keep full 2n x 2n shape with zeros off their own modes, so
/// they can be recombined or transformed without re-indexing. coupling_norm is
/// the max-norm of the cross blocks of M; the division is product-form (no
/// dynamical link between the parts) iff it vanishes.
struct PartitionBlocks {
    std::string first_name;
    std::string second_name;
    QuadraticHamiltonian self_first;
    QuadraticHamiltonian self_second;
    QuadraticHamiltonian coupling;
    double coupling_norm = 0.0;
};

/// Splits h along a bipartition. Throws validity_error for divisions with
/// more or fewer than two parts.
PartitionBlocks partition_blocks(const QuadraticHamiltonian& h, const DivisionSpec& division);

/// Inverse of partition_blocks: exact sum of the three pieces.
QuadraticHamiltonian reassemble(const PartitionBlocks& blocks);

// ------------------------------ normal modes ---------------------------------

/// Decoupling transform for a positive-definite quadratic Hamiltonian.
/// to_normal maps lab coordinates to normal ones; in the normal frame
/// M' = diag(omega) oplus diag(omega) and b' = 0 shift aside, i.e. the system
/// is n independent unit-mass oscillators.
struct NormalModeResult {
    Vector frequencies;        // descending
    Matrix participation;      // column j: lab-position profile of normal mode j
    SymplecticTransform to_normal;
};

/// Computes normal modes. For mechanical Hamiltonians (kinetic block diagonal)
/// the transform is point-like; the general positive-definite case uses a
/// symplectic (Williamson) diagonalization and may be complementary.
///
/// Ordering: frequencies descending; ties broken lexicographically by the
/// sign-canonicalized participation columns. Throws validity_error when M is
/// not positive definite (no stable normal-mode frame exists).
NormalModeResult normal_modes(const QuadraticHamiltonian& h);

}  // namespace bipartition
