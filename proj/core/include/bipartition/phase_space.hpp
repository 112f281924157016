// Phase-space conventions, canonical transformations, divisions.
//
// Conventions used across the library (hbar = 1, dimensionless units):
//   * n canonical modes; phase-space vector ordered z = (x_1..x_n, p_1..p_n).
//   * Symplectic form J = [[0, I], [-I, 0]] in that block ordering.
//   * A linear canonical transformation is a symplectic matrix S (S J S^T = J)
//     plus an optional displacement d; new coordinates are zeta = S z + d.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "bipartition/errors.hpp"

namespace bipartition {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Default max-norm tolerance on the canonicity residual ||S J S^T - J||.
inline constexpr double kCanonicalTol = 1e-10;

// Default tolerance for the point-like / complementary block test.
inline constexpr double kPointLikeTol = 1e-12;

// ----------------------------- mode bookkeeping ------------------------------

/// Ordered list of canonical degrees of freedom. Fixes the positions-first
/// phase-space ordering for every matrix in the library.
struct ModeSystem {
    std::vector<std::string> labels;
    std::vector<double> masses;

    int n_modes() const { return static_cast<int>(labels.size()); }

    /// Validating constructor: labels unique, masses strictly positive,
    /// one mass per label.
    static ModeSystem make(std::vector<std::string> labels, std::vector<double> masses);
};

/// The symplectic form J for n modes: [[0, I], [-I, 0]].
Matrix symplectic_form(int n_modes);

// --------------------------- canonical transforms ----------------------------

/// Linear canonical transformation zeta = S z + d between two coordinate frames.
/// source/target ids are free-form labels used by reports; they carry no
/// structural meaning inside the library.
struct SymplecticTransform {
    Matrix S;
    Vector d;
    std::string source_division;
    std::string target_division;

    int n_modes() const { return static_cast<int>(S.rows()) / 2; }
};

/// Transform with zero displacement.
SymplecticTransform make_transform(Matrix S, std::string source = {}, std::string target = {});

SymplecticTransform identity_transform(int n_modes);

/// Max-norm canonicity residual ||S J S^T - J||.
double canonicity_residual(const Matrix& S);

/// True iff S is square, even-dimensioned, and canonical within tol.
bool validate_symplectic(const SymplecticTransform& transform, double tol = kCanonicalTol);

/// Throws validity_error when validate_symplectic fails.
void require_symplectic(const SymplecticTransform& transform, double tol = kCanonicalTol);

/// Symplectic inverse J^T S^T J with displacement folded in. Exact group
/// inverse up to rounding; no linear solve involved.
SymplecticTransform symplectic_inverse(const SymplecticTransform& transform);

/// Composition: apply `inner` first, then `outer`.
SymplecticTransform compose(const SymplecticTransform& outer, const SymplecticTransform& inner);

/// Completes an invertible position map T into the canonical transform
/// blockdiag(T, T^-T): new positions T x, new momenta T^-T p.
SymplecticTransform extend_point_transform(const Matrix& position_map);

/// Center-of-mass / relative transform for a two-mode system:
///   X_cm = (m1 x1 + m2 x2)/(m1+m2),  x_rel = x1 - x2,
///   P_cm = p1 + p2,                  p_rel = (m2 p1 - m1 p2)/(m1+m2).
/// Mode 0 of the target frame is the center of mass, mode 1 the relative one.
SymplecticTransform two_body_transform(double m1, double m2);

// ------------------------------- divisions -----------------------------------

enum class DivisionKind { point_like, complementary };

const char* to_string(DivisionKind kind);

/// point_like iff the new positions do not depend on the old momenta
/// (upper-right n x n block of S vanishes within tol). Point-like transforms
/// admit configuration-space inversion; complementary ones do not.
DivisionKind classify_division(const SymplecticTransform& transform, double tol = kPointLikeTol);

/// Named assignment of every mode to exactly one subsystem. Part order is the
/// declaration order and is preserved in reports.
struct DivisionSpec {
    std::string name;
    std::vector<std::pair<std::string, std::vector<int>>> parts;

    /// Validating constructor: parts disjoint, nonempty, covering 0..n-1.
    static DivisionSpec make(std::string name,
                             std::vector<std::pair<std::string, std::vector<int>>> parts,
                             int n_modes);

    int n_modes() const;
    bool is_bipartition() const { return parts.size() == 2; }
    const std::vector<int>& part_modes(std::size_t index) const { return parts.at(index).second; }
};

// ---------------------------- moment inversion -------------------------------

/// First and second moments of the position sector only.
struct PositionMoments {
    Vector mean;        // n position means
    Matrix covariance;  // n x n position covariance
};

/// Push position-sector moments forward through a point-like transform:
/// mean' = T mean + d_x, covariance' = T covariance T^T.
PositionMoments transform_position_moments(const Vector& means, const Matrix& covars,
                                           const SymplecticTransform& transform);

/// Recover position-sector moments in the source frame from moments measured
/// in the target frame of a point-like transform. Exact linear propagation:
/// mean = T^-1 (mean' - d_x), covariance = T^-1 covariance' T^-T.
///
/// Complementary transforms are refused: their new positions mix old positions
/// and momenta, and positions and momenta lack simultaneous sharp values, so no
/// configuration-space inversion exists.
PositionMoments invert_moments(const Vector& means, const Matrix& covars,
                               const SymplecticTransform& transform);

}  // namespace bipartition
