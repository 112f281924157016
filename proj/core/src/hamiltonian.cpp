#include "bipartition/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <utility>

namespace bipartition {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kStructureTol = 1e-12;

void require_symmetric(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + " must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw std::invalid_argument(std::string(what) + " must be symmetric");
    }
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

// First index with magnitude above tol made positive; zero columns left alone.
void canonicalize_sign(Eigen::Ref<Vector> column) {
    for (int i = 0; i < column.size(); ++i) {
        if (std::abs(column[i]) > 1e-9) {
            if (column[i] < 0.0) column = -column;
            return;
        }
    }
}

bool lex_less(const Vector& a, const Vector& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] > b[i];  // larger leading weight first
    }
    return false;
}

struct RawModes {
    Vector frequencies;
    Matrix s;  // symplectic, lab -> normal, unordered
};

// Mechanical fast path: M = blockdiag(V, diag(1/m)). Mass weighting keeps the
// transform point-like, so position-only divisions stay position-only.
RawModes mechanical_modes(const Matrix& m_matrix, int n) {
    const Matrix v = m_matrix.topLeftCorner(n, n);
    Vector root_mass(n);
    for (int i = 0; i < n; ++i) {
        root_mass[i] = 1.0 / std::sqrt(m_matrix(n + i, n + i));
    }
    const Matrix d = root_mass.asDiagonal();                  // diag(sqrt m)
    const Matrix d_inv = root_mass.cwiseInverse().asDiagonal();

    Matrix v_tilde = d_inv * v * d_inv;
    v_tilde = 0.5 * (v_tilde + v_tilde.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(v_tilde);
    if (eig.info() != Eigen::Success) {
        throw numeric_error("normal-mode eigensolve did not converge");
    }
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw validity_error(
            "Hamiltonian is not positive definite; no stable normal-mode frame exists");
    }

    const Matrix o = eig.eigenvectors();
    Vector omega = eig.eigenvalues().cwiseSqrt();
    const Matrix s1 = block_diag(d, d_inv);
    const Matrix s2 = block_diag(o.transpose(), o.transpose());
    const Matrix s3 =
        block_diag(Matrix(omega.cwiseSqrt().asDiagonal()),
                   Matrix(omega.cwiseSqrt().cwiseInverse().asDiagonal()));
    return RawModes{std::move(omega), s3 * s2 * s1};
}

// General path: symplectic (Williamson) diagonalization of a positive-definite
// M. Works for arbitrary quadratic couplings, including momentum-momentum and
// position-momentum terms; the resulting transform may be complementary.
RawModes williamson_modes(const Matrix& m_matrix, int n) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m_matrix);
    if (eig.info() != Eigen::Success) {
        throw numeric_error("normal-mode eigensolve did not converge");
    }
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        throw validity_error(
            "Hamiltonian is not positive definite; no stable normal-mode frame exists");
    }
    const Matrix k = eig.operatorSqrt();
    const Matrix j = symplectic_form(n);
    const Matrix w = k * j * k;  // antisymmetric

    // Hermitian auxiliary i W: eigenvalues come in +/- lambda pairs, and the
    // positive half carries the symplectic spectrum of M.
    Eigen::MatrixXcd iw = std::complex<double>(0.0, 1.0) * w.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ceig(iw);
    if (ceig.info() != Eigen::Success) {
        throw numeric_error("normal-mode eigensolve did not converge");
    }

    Vector lambda(n);
    Matrix a_part(2 * n, n);
    Matrix b_part(2 * n, n);
    int found = 0;
    for (int i = 0; i < 2 * n && found < n; ++i) {
        const double value = ceig.eigenvalues()[i];
        if (value <= 0.0) continue;
        Eigen::VectorXcd u = ceig.eigenvectors().col(i);
        Vector a = std::sqrt(2.0) * u.real();
        Vector b = std::sqrt(2.0) * u.imag();
        // The eigenvector phase is free; pick it to pile as much weight as
        // possible onto the position half of `a`, so transforms of
        // position-coupled Hamiltonians come out point-like.
        const Vector ax = a.head(n);
        const Vector bx = b.head(n);
        Eigen::Matrix2d g;
        g << ax.squaredNorm(), -ax.dot(bx),  //
            -ax.dot(bx), bx.squaredNorm();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> phase(g);
        const Eigen::Vector2d dir = phase.eigenvectors().col(1);  // largest eigenvalue
        const double c = dir[0];
        const double s = dir[1];
        Vector a_rot = c * a - s * b;
        Vector b_rot = s * a + c * b;
        a_part.col(found) = a_rot;
        b_part.col(found) = b_rot;
        lambda[found] = value;
        ++found;
    }
    if (found != n) {
        throw numeric_error("symplectic spectrum incomplete; matrix is too ill-conditioned");
    }

    Matrix q(2 * n, 2 * n);
    q.leftCols(n) = a_part;
    q.rightCols(n) = -b_part;
    const Matrix scale =
        block_diag(Matrix(lambda.cwiseSqrt().cwiseInverse().asDiagonal()),
                   Matrix(lambda.cwiseSqrt().cwiseInverse().asDiagonal()));
    Matrix s = scale * q.transpose() * k;
    return RawModes{std::move(lambda), std::move(s)};
}

}  // namespace

// ---------------------------- quadratic Hamiltonian --------------------------

QuadraticHamiltonian build_hamiltonian(const std::vector<double>& masses,
                                       const Matrix& potential) {
    const int n = static_cast<int>(masses.size());
    if (n == 0) {
        throw std::invalid_argument("Hamiltonian needs at least one mode");
    }
    if (potential.rows() != n || potential.cols() != n) {
        throw std::invalid_argument("potential must be n x n");
    }
    require_symmetric(potential, "potential");
    for (double m : masses) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw std::invalid_argument("masses must be positive and finite");
        }
    }
    Matrix m_matrix = Matrix::Zero(2 * n, 2 * n);
    m_matrix.topLeftCorner(n, n) = 0.5 * (potential + potential.transpose());
    for (int i = 0; i < n; ++i) {
        m_matrix(n + i, n + i) = 1.0 / masses[i];
    }
    return QuadraticHamiltonian{std::move(m_matrix), Vector::Zero(2 * n)};
}

QuadraticHamiltonian transform_hamiltonian(const QuadraticHamiltonian& h,
                                           const SymplecticTransform& transform) {
    if (transform.S.rows() != h.M.rows()) {
        throw std::invalid_argument("transform and Hamiltonian mode counts differ");
    }
    require_symplectic(transform);
    const Matrix s_inv = symplectic_inverse(transform).S;
    Matrix m_new = s_inv.transpose() * h.M * s_inv;
    m_new = 0.5 * (m_new + m_new.transpose()).eval();
    Vector b_new = s_inv.transpose() * h.b - m_new * transform.d;
    return QuadraticHamiltonian{std::move(m_new), std::move(b_new)};
}

// ---------------------------- structural split -------------------------------

PartitionBlocks partition_blocks(const QuadraticHamiltonian& h, const DivisionSpec& division) {
    if (!division.is_bipartition()) {
        throw validity_error("structural split is defined for two-part divisions only");
    }
    const int n = h.n_modes();
    if (division.n_modes() != n) {
        throw std::invalid_argument("division and Hamiltonian mode counts differ");
    }

    const auto phase_indices = [n](const std::vector<int>& modes) {
        std::vector<int> idx;
        idx.reserve(2 * modes.size());
        for (int m : modes) idx.push_back(m);
        for (int m : modes) idx.push_back(n + m);
        return idx;
    };
    const std::vector<int> first = phase_indices(division.part_modes(0));
    const std::vector<int> second = phase_indices(division.part_modes(1));

    const auto self_block = [&](const std::vector<int>& idx) {
        QuadraticHamiltonian part{Matrix::Zero(2 * n, 2 * n), Vector::Zero(2 * n)};
        for (int i : idx) {
            for (int j : idx) part.M(i, j) = h.M(i, j);
            part.b[i] = h.b[i];
        }
        return part;
    };

    PartitionBlocks blocks;
    blocks.first_name = division.parts[0].first;
    blocks.second_name = division.parts[1].first;
    blocks.self_first = self_block(first);
    blocks.self_second = self_block(second);
    blocks.coupling = QuadraticHamiltonian{h.M - blocks.self_first.M - blocks.self_second.M,
                                           Vector::Zero(2 * n)};
    blocks.coupling_norm = blocks.coupling.M.cwiseAbs().maxCoeff();
    return blocks;
}

QuadraticHamiltonian reassemble(const PartitionBlocks& blocks) {
    return QuadraticHamiltonian{
        blocks.self_first.M + blocks.self_second.M + blocks.coupling.M,
        blocks.self_first.b + blocks.self_second.b + blocks.coupling.b};
}

// ------------------------------ normal modes ---------------------------------

NormalModeResult normal_modes(const QuadraticHamiltonian& h) {
    const int n = h.n_modes();
    require_symmetric(h.M, "Hamiltonian matrix");
    if (h.b.size() != 2 * n) {
        throw std::invalid_argument("linear term must have one entry per phase coordinate");
    }

    const bool kinetic_diagonal =
        h.M.topRightCorner(n, n).cwiseAbs().maxCoeff() <= kStructureTol &&
        h.M.bottomLeftCorner(n, n).cwiseAbs().maxCoeff() <= kStructureTol &&
        (h.M.bottomRightCorner(n, n) -
         Matrix(h.M.bottomRightCorner(n, n).diagonal().asDiagonal()))
                .cwiseAbs()
                .maxCoeff() <= kStructureTol &&
        h.M.bottomRightCorner(n, n).diagonal().minCoeff() > 0.0;

    RawModes raw = kinetic_diagonal ? mechanical_modes(h.M, n) : williamson_modes(h.M, n);

    // Participation: lab-position profile of each normal coordinate, from the
    // position rows of the transform, unit-normalized and sign-canonical.
    Matrix participation = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        Vector profile = raw.s.row(j).head(n).transpose();
        const double norm = profile.norm();
        if (norm > 1e-12) profile /= norm;
        canonicalize_sign(profile);
        participation.col(j) = profile;
    }

    // Order: frequencies descending, ties by participation profile.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (raw.frequencies[a] != raw.frequencies[b]) {
            return raw.frequencies[a] > raw.frequencies[b];
        }
        return lex_less(participation.col(a), participation.col(b));
    });

    NormalModeResult result;
    result.frequencies.resize(n);
    result.participation.resize(n, n);
    Matrix s_sorted(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        const int from = order[j];
        result.frequencies[j] = raw.frequencies[from];
        result.participation.col(j) = participation.col(from);
        s_sorted.row(j) = raw.s.row(from);
        s_sorted.row(n + j) = raw.s.row(n + from);
    }

    SymplecticTransform to_normal = make_transform(std::move(s_sorted), "", "normal");
    // Center the normal frame on the stationary point so the linear term
    // vanishes there: b' = S^-T b - M' d = 0.
    if (h.b.cwiseAbs().maxCoeff() > 0.0) {
        const Vector b_rot = symplectic_inverse(to_normal).S.transpose() * h.b;
        Vector d(2 * n);
        d.head(n) = b_rot.head(n).cwiseQuotient(result.frequencies);
        d.tail(n) = b_rot.tail(n).cwiseQuotient(result.frequencies);
        to_normal.d = d;
    }
    require_symplectic(to_normal);
    result.to_normal = std::move(to_normal);
    return result;
}

}  // namespace bipartition
