#include "bipartition/oracle.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace bipartition {

namespace {

constexpr double kRealityTol = 1e-9;

}  // namespace

GridWavefunction synthesize(const GaussianState& state, const GridOptions& options) {
    if (state.n_modes() != 2) {
        throw validity_error("grid oracle supports exactly two modes");
    }
    if (!is_pure(state)) {
        throw validity_error("grid oracle needs a pure state; mixed states have no wavefunction");
    }
    if (options.points < 16 || options.points > 2048) {
        throw std::invalid_argument("grid size must be between 16 and 2048 points per axis");
    }
    if (!(options.extent_sigmas > 0.0)) {
        throw std::invalid_argument("grid extent must be positive");
    }

    const Matrix sigma_xx = state.sigma.topLeftCorner(2, 2);
    const Matrix sigma_xp = state.sigma.topRightCorner(2, 2);
    const double scale = std::max(1.0, state.sigma.cwiseAbs().maxCoeff());
    if (sigma_xp.cwiseAbs().maxCoeff() > kRealityTol * scale) {
        throw validity_error(
            "grid oracle needs a real wavefunction: position-momentum cross covariance must "
            "vanish");
    }

    // |psi(x)|^2 is the Gaussian with covariance sigma_xx, so the real
    // wavefunction is exp(-x^T A x / 2) with A = sigma_xx^-1 / 2.
    const Matrix a = 0.5 * sigma_xx.inverse();

    const double spread = std::sqrt(std::max(sigma_xx(0, 0), sigma_xx(1, 1)));
    const double wanted = options.extent_sigmas * spread;
    double half_extent = options.half_extent > 0.0 ? options.half_extent : wanted;
    bool expanded = false;
    if (options.half_extent > 0.0 && options.allow_expand && half_extent < wanted) {
        half_extent = wanted;
        expanded = true;
    }

    const int n = options.points;
    const double spacing = 2.0 * half_extent / (n - 1);
    GridWavefunction psi;
    psi.half_extent = half_extent;
    psi.spacing = spacing;
    psi.expanded = expanded;
    psi.centers_first.resize(n);
    psi.centers_second.resize(n);
    for (int i = 0; i < n; ++i) {
        const double offset = -half_extent + i * spacing;
        psi.centers_first[i] = state.mean[0] + offset;
        psi.centers_second[i] = state.mean[1] + offset;
    }

    psi.amplitudes.resize(n, n);
    for (int i = 0; i < n; ++i) {
        const double u = psi.centers_first[i] - state.mean[0];
        for (int j = 0; j < n; ++j) {
            const double w = psi.centers_second[j] - state.mean[1];
            const double quad = a(0, 0) * u * u + 2.0 * a(0, 1) * u * w + a(1, 1) * w * w;
            psi.amplitudes(i, j) = std::exp(-0.5 * quad);
        }
    }
    // Continuum normalization, not grid normalization: the grid mass then
    // reveals clipping or undersampling through the Schmidt sum check instead
    // of silently renormalizing it away. integral of exp(-x^T A x) over the
    // plane is pi / sqrt(det A).
    psi.amplitudes *= std::sqrt(std::sqrt(a.determinant()) / std::numbers::pi);
    return psi;
}

std::vector<double> schmidt_spectrum(const GridWavefunction& psi, double normalization_tol) {
    if (psi.amplitudes.rows() == 0 || psi.spacing <= 0.0) {
        throw std::invalid_argument("wavefunction grid is empty");
    }
    Eigen::BDCSVD<Matrix> svd(psi.amplitudes);
    std::vector<double> coefficients;
    coefficients.reserve(svd.singularValues().size());
    double sum_sq = 0.0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        const double c = svd.singularValues()[i] * psi.spacing;
        coefficients.push_back(c);
        sum_sq += c * c;
    }
    if (std::abs(sum_sq - 1.0) > normalization_tol) {
        std::ostringstream msg;
        msg << "Schmidt coefficients sum to " << sum_sq
            << " instead of 1; the grid is too small or too coarse for this state";
        throw validity_error(msg.str());
    }
    return coefficients;
}

OracleMeasures oracle_measures(const GaussianState& state, const GridOptions& options) {
    const GridWavefunction psi = synthesize(state, options);
    const std::vector<double> c = schmidt_spectrum(psi);

    OracleMeasures out;
    out.expanded = psi.expanded;
    double sum = 0.0;
    for (double value : c) {
        const double p = value * value;
        out.schmidt_sum_sq += p;
        if (p > 1e-300) {
            out.entropy -= p * std::log(p);
        }
        sum += value;
    }
    out.log_neg = 2.0 * std::log(sum);
    return out;
}

}  // namespace bipartition
