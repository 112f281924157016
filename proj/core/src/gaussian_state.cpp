#include "bipartition/gaussian_state.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace bipartition {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_covariance_shape(const Vector& mean, const Matrix& sigma) {
    if (mean.size() < 2 || mean.size() % 2 != 0) {
        throw std::invalid_argument("mean vector must have an (x, p) pair per mode");
    }
    if (sigma.rows() != mean.size() || sigma.cols() != mean.size()) {
        throw std::invalid_argument("covariance matrix must be 2n x 2n");
    }
    if (!mean.allFinite() || !sigma.allFinite()) {
        throw std::invalid_argument("state moments must be finite");
    }
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw std::invalid_argument("covariance matrix must be symmetric");
    }
}

}  // namespace

// ------------------------------ Gaussian state -------------------------------

GaussianState make_state(Vector mean, Matrix sigma, double tol) {
    require_covariance_shape(mean, sigma);
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    GaussianState state{std::move(mean), std::move(sigma)};
    const double margin = validity_margin(state);
    if (margin < -tol) {
        std::ostringstream msg;
        msg << "covariance matrix violates the uncertainty relation: smallest symplectic "
            << "eigenvalue " << (margin + 0.5) << " is below the vacuum floor 1/2";
        throw validity_error(msg.str());
    }
    return state;
}

Vector symplectic_spectrum(const Matrix& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 2 || sigma.rows() % 2 != 0) {
        throw std::invalid_argument("covariance matrix must be 2n x 2n");
    }
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw std::invalid_argument("covariance matrix must be symmetric");
    }
    const int n = static_cast<int>(sigma.rows()) / 2;
    const Matrix j = symplectic_form(n);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success) {
        throw numeric_error("symplectic spectrum eigensolve did not converge");
    }
    Vector nus(n);
    if (eig.eigenvalues().minCoeff() > 0.0) {
        // Positive definite: -(K J K)^2 with K = sigma^(1/2) is symmetric psd
        // with each nu^2 doubled.
        const Matrix k = eig.operatorSqrt();
        const Matrix w = k * j * k;
        Matrix w2 = -(w * w);
        w2 = 0.5 * (w2 + w2.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> pair_eig(w2);
        if (pair_eig.info() != Eigen::Success) {
            throw numeric_error("symplectic spectrum eigensolve did not converge");
        }
        for (int i = 0; i < n; ++i) {
            // Eigenvalues ascend; pairs sit at (2i, 2i+1). Descend in output.
            const double v = std::max(0.0, pair_eig.eigenvalues()[2 * (n - 1 - i)]);
            nus[i] = std::sqrt(v);
        }
    } else {
        // Indefinite inputs (not produced by physical states, but accepted):
        // moduli of the J*sigma eigenvalue pairs.
        Eigen::EigenSolver<Matrix> gen_eig(j * sigma);
        if (gen_eig.info() != Eigen::Success) {
            throw numeric_error("symplectic spectrum eigensolve did not converge");
        }
        std::vector<double> moduli(2 * n);
        for (int i = 0; i < 2 * n; ++i) {
            moduli[i] = std::abs(gen_eig.eigenvalues()[i]);
        }
        std::sort(moduli.begin(), moduli.end(), std::greater<>());
        for (int i = 0; i < n; ++i) {
            nus[i] = moduli[2 * i];
        }
    }
    return nus;
}

double validity_margin(const GaussianState& state) {
    return symplectic_spectrum(state.sigma).minCoeff() - 0.5;
}

bool is_pure(const GaussianState& state, double tol) {
    return (symplectic_spectrum(state.sigma).array() - 0.5).abs().maxCoeff() <= tol;
}

// ------------------------------ frame changes --------------------------------

GaussianState apply_transform(const GaussianState& state, const SymplecticTransform& transform) {
    if (transform.S.rows() != state.mean.size()) {
        throw std::invalid_argument("transform and state mode counts differ");
    }
    require_symplectic(transform);
    GaussianState out;
    out.mean = transform.S * state.mean + transform.d;
    out.sigma = transform.S * state.sigma * transform.S.transpose();
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    return out;
}

GaussianState reduce(const GaussianState& state, const std::vector<int>& modes) {
    const int n = state.n_modes();
    if (modes.empty()) {
        throw std::invalid_argument("reduction needs at least one mode");
    }
    std::set<int> seen;
    for (int m : modes) {
        if (m < 0 || m >= n) {
            throw std::invalid_argument("reduction references a mode outside the system");
        }
        if (!seen.insert(m).second) {
            throw std::invalid_argument("reduction lists a mode twice");
        }
    }
    const int k = static_cast<int>(modes.size());
    std::vector<int> idx(2 * k);
    for (int i = 0; i < k; ++i) {
        idx[i] = modes[i];
        idx[k + i] = n + modes[i];
    }
    GaussianState out;
    out.mean.resize(2 * k);
    out.sigma.resize(2 * k, 2 * k);
    for (int i = 0; i < 2 * k; ++i) {
        out.mean[i] = state.mean[idx[i]];
        for (int j = 0; j < 2 * k; ++j) {
            out.sigma(i, j) = state.sigma(idx[i], idx[j]);
        }
    }
    return out;
}

// ----------------------------- state preparation -----------------------------

GaussianState vacuum_state(int n_modes) {
    if (n_modes <= 0) {
        throw std::invalid_argument("vacuum needs at least one mode");
    }
    return GaussianState{Vector::Zero(2 * n_modes),
                         0.5 * Matrix::Identity(2 * n_modes, 2 * n_modes)};
}

GaussianState ground_state(const QuadraticHamiltonian& h) {
    const NormalModeResult nm = normal_modes(h);
    const Matrix gram = nm.to_normal.S.transpose() * nm.to_normal.S;
    Matrix sigma = 0.5 * gram.llt().solve(Matrix::Identity(gram.rows(), gram.cols()));
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    Vector mean = Vector::Zero(h.b.size());
    if (h.b.cwiseAbs().maxCoeff() > 0.0) {
        // Stationary center: M mean = -b. M is positive definite here, or the
        // normal-mode solve above would have refused.
        mean = h.M.llt().solve(-h.b);
    }
    return make_state(std::move(mean), std::move(sigma));
}

GaussianState wavepacket_mode(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("wavepacket width must be positive and finite");
    }
    Matrix sigma = Matrix::Zero(2, 2);
    sigma(0, 0) = width * width;
    sigma(1, 1) = 0.25 / (width * width);
    return GaussianState{Vector::Zero(2), std::move(sigma)};
}

double ground_width(double mass, double omega) {
    if (!(mass > 0.0) || !(omega > 0.0)) {
        throw std::invalid_argument("ground width needs positive mass and frequency");
    }
    return 1.0 / std::sqrt(2.0 * mass * omega);
}

GaussianState prepare_product_center(const QuadraticHamiltonian& h,
                                     const SymplecticTransform& to_frame,
                                     double center_width) {
    const int n = h.n_modes();
    if (n < 2) {
        throw std::invalid_argument("product preparation needs at least two modes");
    }
    if (!(center_width > 0.0) || !std::isfinite(center_width)) {
        throw std::invalid_argument("center width must be positive and finite");
    }
    const QuadraticHamiltonian in_frame = transform_hamiltonian(h, to_frame);

    // Cross terms between mode 0 and the rest must vanish, otherwise the rest
    // has no ground state of its own.
    double cross = 0.0;
    for (int i : {0, n}) {
        for (int j = 0; j < 2 * n; ++j) {
            if (j == 0 || j == n) continue;
            cross = std::max(cross, std::abs(in_frame.M(i, j)));
        }
    }
    const double scale = std::max(1.0, in_frame.M.cwiseAbs().maxCoeff());
    if (cross > 1e-10 * scale) {
        throw validity_error(
            "product preparation refused: the chosen frame couples the center mode to the rest");
    }

    // Rest modes: ground state of their own (n-1)-mode block.
    const int r = n - 1;
    std::vector<int> rest_idx(2 * r);
    for (int i = 0; i < r; ++i) {
        rest_idx[i] = 1 + i;
        rest_idx[r + i] = n + 1 + i;
    }
    QuadraticHamiltonian rest{Matrix(2 * r, 2 * r), Vector(2 * r)};
    for (int i = 0; i < 2 * r; ++i) {
        rest.b[i] = in_frame.b[rest_idx[i]];
        for (int j = 0; j < 2 * r; ++j) {
            rest.M(i, j) = in_frame.M(rest_idx[i], rest_idx[j]);
        }
    }
    const GaussianState rest_ground = ground_state(rest);
    const GaussianState center = wavepacket_mode(center_width);

    GaussianState in_frame_state{Vector::Zero(2 * n), Matrix::Zero(2 * n, 2 * n)};
    in_frame_state.sigma(0, 0) = center.sigma(0, 0);
    in_frame_state.sigma(n, n) = center.sigma(1, 1);
    for (int i = 0; i < 2 * r; ++i) {
        in_frame_state.mean[rest_idx[i]] = rest_ground.mean[i];
        for (int j = 0; j < 2 * r; ++j) {
            in_frame_state.sigma(rest_idx[i], rest_idx[j]) = rest_ground.sigma(i, j);
        }
    }
    return apply_transform(in_frame_state, symplectic_inverse(to_frame));
}

}  // namespace bipartition
