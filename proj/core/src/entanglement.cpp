#include "bipartition/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bipartition {

namespace {

// PPT decides separability exactly only for 1 x 1 and 1 x N mode splits.
constexpr double kPptDecisionTol = 1e-9;

std::vector<int> checked_modes(const std::vector<int>& modes, int n) {
    if (modes.empty()) {
        throw std::invalid_argument("mode list must be nonempty");
    }
    std::set<int> seen;
    for (int m : modes) {
        if (m < 0 || m >= n) {
            throw std::invalid_argument("mode list references a mode outside the system");
        }
        if (!seen.insert(m).second) {
            throw std::invalid_argument("mode list repeats a mode");
        }
    }
    return modes;
}

}  // namespace

const char* to_string(Separability s) {
    switch (s) {
        case Separability::separable: return "separable";
        case Separability::entangled: return "entangled";
        case Separability::undecided: return "undecided";
    }
    return "unknown";
}

// ------------------------------ scalar measures ------------------------------

double entropy_function(double nu) {
    if (!(nu > 0.5)) {
        return 0.0;
    }
    const double up = nu + 0.5;
    const double down = nu - 0.5;
    return up * std::log(up) - down * std::log(down);
}

double state_entropy(const GaussianState& state) {
    const Vector nus = symplectic_spectrum(state.sigma);
    double total = 0.0;
    for (int i = 0; i < nus.size(); ++i) {
        total += entropy_function(nus[i]);
    }
    return total;
}

Matrix partial_transpose(const Matrix& sigma, const std::vector<int>& modes, int n_modes) {
    if (sigma.rows() != 2 * n_modes || sigma.cols() != 2 * n_modes) {
        throw std::invalid_argument("covariance matrix must be 2n x 2n");
    }
    checked_modes(modes, n_modes);
    // Time reversal on the chosen part: flip its momenta, sigma -> L sigma L.
    Vector flip = Vector::Ones(2 * n_modes);
    for (int m : modes) {
        flip[n_modes + m] = -1.0;
    }
    return flip.asDiagonal() * sigma * flip.asDiagonal();
}

double log_negativity(const GaussianState& state, const std::vector<int>& modes) {
    const Matrix tilde = partial_transpose(state.sigma, modes, state.n_modes());
    const Vector nus = symplectic_spectrum(tilde);
    double total = 0.0;
    for (int i = 0; i < nus.size(); ++i) {
        if (nus[i] > 0.0 && 2.0 * nus[i] < 1.0) {
            total += -std::log(2.0 * nus[i]);
        }
    }
    return total;
}

double entanglement_entropy(const GaussianState& state, const std::vector<int>& modes,
                            double purity_tol) {
    checked_modes(modes, state.n_modes());
    if (!is_pure(state, purity_tol)) {
        throw validity_error(
            "entanglement entropy is defined for pure states; this state is mixed, so the "
            "reduced entropy would measure noise as well as entanglement");
    }
    return state_entropy(reduce(state, modes));
}

// ------------------------------ division report ------------------------------

EntanglementReport analyze_division(const GaussianState& state, const DivisionSpec& division) {
    if (!division.is_bipartition()) {
        throw validity_error("entanglement analysis is defined for two-part divisions only");
    }
    if (division.n_modes() != state.n_modes()) {
        throw std::invalid_argument("division and state mode counts differ");
    }
    const std::vector<int>& first = division.part_modes(0);
    const std::vector<int>& second = division.part_modes(1);

    EntanglementReport report;
    report.division_name = division.name;
    report.first_name = division.parts[0].first;
    report.second_name = division.parts[1].first;
    report.pure = is_pure(state);
    report.entropy_first = state_entropy(reduce(state, first));

    const Matrix tilde = partial_transpose(state.sigma, first, state.n_modes());
    const Vector nus = symplectic_spectrum(tilde);
    report.min_ppt_eigenvalue = nus.minCoeff();
    double log_neg = 0.0;
    for (int i = 0; i < nus.size(); ++i) {
        if (nus[i] > 0.0 && 2.0 * nus[i] < 1.0) {
            log_neg += -std::log(2.0 * nus[i]);
        }
    }
    report.log_neg = log_neg;

    const std::size_t small = std::min(first.size(), second.size());
    if (small == 1) {
        report.separability = report.min_ppt_eigenvalue >= 0.5 - kPptDecisionTol
                                  ? Separability::separable
                                  : Separability::entangled;
    } else {
        report.separability =
            log_neg > 0.0 ? Separability::entangled : Separability::undecided;
    }
    return report;
}

// ----------------------------- division compare ------------------------------

std::vector<EntanglementReport> compare_divisions(const GaussianState& state,
                                                  const std::vector<DivisionFrame>& frames) {
    std::vector<EntanglementReport> reports;
    reports.reserve(frames.size());
    for (const auto& frame : frames) {
        const GaussianState moved = apply_transform(state, frame.to_frame);
        reports.push_back(analyze_division(moved, frame.division));
    }
    return reports;
}

}  // namespace bipartition
