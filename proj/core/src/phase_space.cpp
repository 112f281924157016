#include "bipartition/phase_space.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace bipartition {

namespace {

bool finite(const Matrix& m) { return m.allFinite(); }

void require_moment_shapes(const Vector& means, const Matrix& covars, int n) {
    if (means.size() != n) {
        throw std::invalid_argument("position mean vector must have one entry per mode");
    }
    if (covars.rows() != n || covars.cols() != n) {
        throw std::invalid_argument("position covariance must be n x n");
    }
}

}  // namespace

// ----------------------------- mode bookkeeping ------------------------------

ModeSystem ModeSystem::make(std::vector<std::string> labels, std::vector<double> masses) {
    if (labels.empty()) {
        throw std::invalid_argument("mode system needs at least one mode");
    }
    if (labels.size() != masses.size()) {
        throw std::invalid_argument("mode system needs one mass per label");
    }
    std::set<std::string> seen;
    for (const auto& label : labels) {
        if (label.empty()) {
            throw std::invalid_argument("mode labels must be nonempty");
        }
        if (!seen.insert(label).second) {
            throw std::invalid_argument("duplicate mode label: " + label);
        }
    }
    for (double m : masses) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw std::invalid_argument("mode masses must be positive and finite");
        }
    }
    return ModeSystem{std::move(labels), std::move(masses)};
}

Matrix symplectic_form(int n_modes) {
    if (n_modes <= 0) {
        throw std::invalid_argument("symplectic form needs at least one mode");
    }
    Matrix j = Matrix::Zero(2 * n_modes, 2 * n_modes);
    j.topRightCorner(n_modes, n_modes).setIdentity();
    j.bottomLeftCorner(n_modes, n_modes) = -Matrix::Identity(n_modes, n_modes);
    return j;
}

// --------------------------- canonical transforms ----------------------------

SymplecticTransform make_transform(Matrix S, std::string source, std::string target) {
    Vector d = Vector::Zero(S.rows());
    return SymplecticTransform{std::move(S), std::move(d), std::move(source), std::move(target)};
}

SymplecticTransform identity_transform(int n_modes) {
    return make_transform(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

double canonicity_residual(const Matrix& S) {
    if (S.rows() != S.cols() || S.rows() < 2 || S.rows() % 2 != 0 || !finite(S)) {
        return std::numeric_limits<double>::infinity();
    }
    const int n = static_cast<int>(S.rows()) / 2;
    const Matrix j = symplectic_form(n);
    return (S * j * S.transpose() - j).cwiseAbs().maxCoeff();
}

bool validate_symplectic(const SymplecticTransform& transform, double tol) {
    if (transform.d.size() != transform.S.rows() || !transform.d.allFinite()) {
        return false;
    }
    return canonicity_residual(transform.S) <= tol;
}

void require_symplectic(const SymplecticTransform& transform, double tol) {
    if (!validate_symplectic(transform, tol)) {
        std::ostringstream msg;
        msg << "transform is not canonical: residual " << canonicity_residual(transform.S)
            << " exceeds " << tol;
        throw validity_error(msg.str());
    }
}

SymplecticTransform symplectic_inverse(const SymplecticTransform& transform) {
    const int n = transform.n_modes();
    const Matrix j = symplectic_form(n);
    Matrix s_inv = j.transpose() * transform.S.transpose() * j;
    Vector d_inv = -(s_inv * transform.d);
    return SymplecticTransform{std::move(s_inv), std::move(d_inv), transform.target_division,
                               transform.source_division};
}

SymplecticTransform compose(const SymplecticTransform& outer, const SymplecticTransform& inner) {
    if (outer.S.rows() != inner.S.rows()) {
        throw std::invalid_argument("cannot compose transforms of different mode counts");
    }
    Matrix s = outer.S * inner.S;
    Vector d = outer.S * inner.d + outer.d;
    return SymplecticTransform{std::move(s), std::move(d), inner.source_division,
                               outer.target_division};
}

SymplecticTransform extend_point_transform(const Matrix& position_map) {
    if (position_map.rows() != position_map.cols() || position_map.rows() == 0) {
        throw std::invalid_argument("position map must be square");
    }
    if (!finite(position_map)) {
        throw std::invalid_argument("position map must be finite");
    }
    const int n = static_cast<int>(position_map.rows());
    Eigen::FullPivLU<Matrix> lu(position_map);
    if (!lu.isInvertible()) {
        throw validity_error("position map is singular; it does not define new coordinates");
    }
    Matrix s = Matrix::Zero(2 * n, 2 * n);
    s.topLeftCorner(n, n) = position_map;
    // Momenta co-transform contragrediently so that {x'_i, p'_j} = delta_ij.
    s.bottomRightCorner(n, n) = lu.inverse().transpose();
    return make_transform(std::move(s));
}

SymplecticTransform two_body_transform(double m1, double m2) {
    if (!(m1 > 0.0) || !(m2 > 0.0) || !std::isfinite(m1) || !std::isfinite(m2)) {
        throw std::invalid_argument("two-body transform needs positive finite masses");
    }
    const double total = m1 + m2;
    Matrix t(2, 2);
    t << m1 / total, m2 / total,  //
        1.0, -1.0;
    return extend_point_transform(t);
}

// ------------------------------- divisions -----------------------------------

const char* to_string(DivisionKind kind) {
    switch (kind) {
        case DivisionKind::point_like: return "point_like";
        case DivisionKind::complementary: return "complementary";
    }
    return "unknown";
}

DivisionKind classify_division(const SymplecticTransform& transform, double tol) {
    const int n = transform.n_modes();
    const double mixing = transform.S.topRightCorner(n, n).cwiseAbs().maxCoeff();
    return mixing <= tol ? DivisionKind::point_like : DivisionKind::complementary;
}

DivisionSpec DivisionSpec::make(std::string name,
                                std::vector<std::pair<std::string, std::vector<int>>> parts,
                                int n_modes) {
    if (parts.size() < 2) {
        throw std::invalid_argument("division needs at least two parts");
    }
    std::set<std::string> names;
    std::vector<int> all;
    for (const auto& [part_name, modes] : parts) {
        if (part_name.empty()) {
            throw std::invalid_argument("division part names must be nonempty");
        }
        if (!names.insert(part_name).second) {
            throw std::invalid_argument("duplicate part name: " + part_name);
        }
        if (modes.empty()) {
            throw std::invalid_argument("division part '" + part_name + "' is empty");
        }
        for (int m : modes) {
            if (m < 0 || m >= n_modes) {
                throw std::invalid_argument("division part '" + part_name +
                                            "' references a mode outside the system");
            }
            all.push_back(m);
        }
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] != static_cast<int>(i)) {
            throw std::invalid_argument("division must assign every mode to exactly one part");
        }
    }
    if (static_cast<int>(all.size()) != n_modes) {
        throw std::invalid_argument("division must cover all modes");
    }
    return DivisionSpec{std::move(name), std::move(parts)};
}

int DivisionSpec::n_modes() const {
    int total = 0;
    for (const auto& [ignored, modes] : parts) {
        total += static_cast<int>(modes.size());
    }
    return total;
}

// ---------------------------- moment inversion -------------------------------

PositionMoments transform_position_moments(const Vector& means, const Matrix& covars,
                                           const SymplecticTransform& transform) {
    const int n = transform.n_modes();
    require_moment_shapes(means, covars, n);
    if (classify_division(transform) != DivisionKind::point_like) {
        throw validity_error(
            "transform mixes positions into momenta; position moments do not propagate through "
            "it on their own");
    }
    const Matrix t = transform.S.topLeftCorner(n, n);
    PositionMoments out;
    out.mean = t * means + transform.d.head(n);
    out.covariance = t * covars * t.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

PositionMoments invert_moments(const Vector& means, const Matrix& covars,
                               const SymplecticTransform& transform) {
    const int n = transform.n_modes();
    require_moment_shapes(means, covars, n);
    if (classify_division(transform) != DivisionKind::point_like) {
        throw validity_error(
            "moment inversion refused: the transform is complementary, so its new positions mix "
            "source positions with source momenta, which have no simultaneous sharp values; only "
            "point-like transforms admit configuration-space inversion");
    }
    const Matrix t = transform.S.topLeftCorner(n, n);
    // Point-like canonical transforms have invertible position blocks.
    Eigen::PartialPivLU<Matrix> lu(t);
    PositionMoments out;
    out.mean = lu.solve(means - transform.d.head(n));
    out.covariance = lu.solve(lu.solve(covars.transpose()).transpose());
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

}  // namespace bipartition
