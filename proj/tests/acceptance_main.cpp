// End-to-end gate over the library's headline claims.
//
// Each check prints one PASS/FAIL line with its runtime. The process exit
// code is the number of failed checks, so `ctest` treats any red line as a
// failure of the whole gate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "bipartition/commands.hpp"
#include "bipartition/oracle.hpp"
#include "bipartition/open_system.hpp"
#include "support/test_support.hpp"

using namespace bipartition;

namespace {

struct Gate {
    int failures = 0;

    template <typename Fn>
    void run(const char* label, Fn&& body) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            detail = body();
            ok = true;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-28s (%6.2f s)  %s\n", ok ? "PASS" : "FAIL", label, seconds,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::string fixture(const char* name) {
    return std::string(BIPARTITION_CONFIG_DIR) + "/" + name;
}

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::string fmt(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.3g", value);
    return buffer;
}

// -------- 1: one state, two divisions, opposite entanglement verdicts --------

std::string check_division_relativity() {
    const auto model = load_model(fixture("hydrogen_analog.cfg"));
    const auto doc = nlohmann::json::parse(run_command(Command::compare, model).json);

    double e_p = -1.0;
    double cm_r = -1.0;
    for (const auto& row : doc["results"]) {
        if (row["division"] == "e_p") e_p = row["log_negativity"].get<double>();
        if (row["division"] == "cm_r") cm_r = row["log_negativity"].get<double>();
    }
    require(cm_r >= 0.0 && cm_r < 1e-10, "collective division must carry no entanglement");
    require(e_p > 0.01, "particle division must be entangled");

    RunOverrides overrides;
    overrides.division = "e_p";
    overrides.tolerance = 1e-3;
    const auto oracle =
        nlohmann::json::parse(run_command(Command::oracle_check, model, overrides).json);
    require(oracle["agree"] == true, "oracle must agree at 1e-3");

    return "E_N(e,p) = " + fmt(e_p) + ", E_N(cm,r) = " + fmt(cm_r) +
           ", oracle diff " + fmt(oracle["difference"]["log_negativity"].get<double>());
}

// ---------- 2: the decoupling transform kills coupling and E_N both ----------

std::string check_decoupling() {
    const auto model = load_model(fixture("coupled_pair.cfg"));

    RunOverrides modes;
    modes.division = "modes";
    const auto part =
        nlohmann::json::parse(run_command(Command::partition, model, modes).json);
    const double coupling = part["coupling_norm"].get<double>();
    require(coupling < 1e-12, "normal frame must decouple the Hamiltonian");

    const auto decoupled =
        nlohmann::json::parse(run_command(Command::entangle, model, modes).json);
    require(decoupled["log_negativity"].get<double>() < 1e-10,
            "ground state must be a product across the normal division");

    const auto native = nlohmann::json::parse(run_command(Command::entangle, model).json);
    require(native["log_negativity"].get<double>() > 0.0,
            "coupled oscillators must be entangled in the native division");

    return "coupling " + fmt(coupling) + ", E_N(modes) = " +
           fmt(decoupled["log_negativity"].get<double>()) + ", E_N(native) = " +
           fmt(native["log_negativity"].get<double>());
}

// ------------- 3: property sweep over 1000 random canonical maps -------------

std::string check_symplectic_suite() {
    std::mt19937_64 rng(2026);
    Matrix v(2, 2);
    v << 1.0, 0.5,  //
        0.5, 1.0;
    const auto h = build_hamiltonian({1.0, 1.0}, v);
    const auto g = ground_state(h);
    const auto division = DivisionSpec::make("pair", {{"a", {0}}, {"b", {1}}}, 2);
    const double base_log_neg = log_negativity(g, {0});

    double worst_residual = 0.0;
    double worst_purity = 0.0;
    double worst_invariance = 0.0;

    GaussianState chained = g;
    int chain_length = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const auto s = test_support::random_symplectic(n, rng, 0.4);
        worst_residual = std::max(worst_residual, canonicity_residual(s.S));

        // Purity transport: fresh application to a pure state of matching size.
        const auto pure = n == 2 ? g : vacuum_state(n);
        const auto moved = apply_transform(pure, s);
        const auto nu = symplectic_spectrum(moved.sigma);
        for (int i = 0; i < nu.size(); ++i) {
            worst_purity = std::max(worst_purity, std::abs(nu[i] - 0.5));
        }

        // Modest chains accumulate no drift either.
        if (n == 2) {
            chained = apply_transform(chained, s);
            if (++chain_length == 8) {
                const auto chained_nu = symplectic_spectrum(chained.sigma);
                for (int i = 0; i < chained_nu.size(); ++i) {
                    worst_purity = std::max(worst_purity, std::abs(chained_nu[i] - 0.5));
                }
                chained = g;
                chain_length = 0;
            }

            // Division-local transforms must not move E_N across that division.
            const auto local = test_support::random_division_local({{0}, {1}}, 2, rng, 0.4);
            const auto shuffled = apply_transform(g, local);
            worst_invariance = std::max(
                worst_invariance, std::abs(log_negativity(shuffled, {0}) - base_log_neg));
        }
    }

    require(worst_residual < 1e-10, "canonicity residual " + fmt(worst_residual));
    require(worst_purity < 1e-9, "purity drift " + fmt(worst_purity));
    require(worst_invariance < 1e-9, "E_N invariance " + fmt(worst_invariance));
    return "residual " + fmt(worst_residual) + ", purity drift " + fmt(worst_purity) +
           ", E_N drift " + fmt(worst_invariance);
}

// ------------- 4: grid oracle across the squeezing range, N = 512 ------------

std::string check_oracle_equivalence() {
    double worst_entropy = 0.0;
    double worst_log_neg = 0.0;
    int states = 0;

    for (int i = 1; i <= 10; ++i) {
        // Rotated anisotropic potential: E_N across the cut equals exactly
        // ln(omega_plus/omega_minus)/4 * 2 = 2r with r = i/10, up to r = 1.
        const double r = 0.1 * i;
        const double c = std::sqrt(0.5);
        Matrix rot(2, 2);
        rot << c, -c,  //
            c, c;
        Matrix diag = Matrix::Zero(2, 2);
        diag(0, 0) = std::exp(8.0 * r);
        diag(1, 1) = 1.0;
        const Matrix v = rot * diag * rot.transpose();
        auto h = build_hamiltonian({1.0, 1.0}, Matrix(0.5 * (v + v.transpose())));
        if (i == 5) h.b = Vector::Ones(4);  // one displaced state in the sweep

        const auto g = ground_state(h);
        const double log_neg = log_negativity(g, {0});
        const double entropy = entanglement_entropy(g, {0});
        require(std::abs(log_neg - 2.0 * r) < 1e-9, "squeezing sweep is mis-scaled");

        const auto oracle = oracle_measures(g);
        worst_entropy = std::max(worst_entropy, std::abs(oracle.entropy - entropy));
        worst_log_neg = std::max(worst_log_neg, std::abs(oracle.log_neg - log_neg));
        ++states;
    }

    require(worst_entropy < 1e-3, "entropy disagreement " + fmt(worst_entropy));
    require(worst_log_neg < 1e-3, "log negativity disagreement " + fmt(worst_log_neg));
    return std::to_string(states) + " states to E_N = 2, entropy diff " + fmt(worst_entropy) +
           ", E_N diff " + fmt(worst_log_neg);
}

// ----------- 5: noise on the internal mode never touches the center ----------

std::string check_shielding() {
    const auto model = load_model(fixture("hydrogen_trapped.cfg"));
    const double t_final = 10.0;

    // Native frame: mode 0 is the center, mode 1 the internal coordinate;
    // the declared noise diffuses the internal mode only.
    const auto evolved =
        evolve(model.initial_state, model.hamiltonian, *model.noise, t_final);
    Matrix drift = Matrix::Zero(2, 2);
    drift(0, 0) = evolved.sigma(0, 0) - model.initial_state.sigma(0, 0);
    drift(0, 1) = evolved.sigma(0, 2) - model.initial_state.sigma(0, 2);
    drift(1, 0) = drift(0, 1);
    drift(1, 1) = evolved.sigma(2, 2) - model.initial_state.sigma(2, 2);
    const double rate = drift.cwiseAbs().maxCoeff() / t_final;
    require(rate < 1e-8, "center covariance drift " + fmt(rate) + " per unit time");

    // Particle-division entanglement decays strictly.
    const auto frame = model.frame_for(model.division_named("e_p"));
    GaussianState current = model.initial_state;
    double previous = log_negativity(apply_transform(current, frame.to_frame), {0});
    const double initial = previous;
    for (int i = 0; i < 8; ++i) {
        current = evolve(current, model.hamiltonian, *model.noise, t_final / 8.0);
        const double value = log_negativity(apply_transform(current, frame.to_frame), {0});
        require(value < previous, "particle-division E_N must decrease at every sample");
        previous = value;
    }

    const auto ranking =
        nlohmann::json::parse(run_command(Command::shield_search, model).json)["ranking"];
    require(ranking[0]["division"] == "cm_r", "collective division must rank first");
    require(ranking[1]["division"] == "e_p", "particle division must rank second");

    return "center drift " + fmt(rate) + "/t, E_N " + fmt(initial) + " -> " + fmt(previous) +
           ", shield picks cm_r";
}

// ------------- 6: configuration-space inversion and its refusal --------------

std::string check_moment_inversion() {
    const auto model = load_model(fixture("hydrogen_analog.cfg"));
    const auto doc = nlohmann::json::parse(run_command(Command::invert_means, model).json);
    const double roundtrip = doc["roundtrip_max_error"].get<double>();
    require(roundtrip <= 1e-12, "roundtrip error " + fmt(roundtrip));

    RunOverrides overrides;
    overrides.transform = "fourier";
    bool refused = false;
    std::string message;
    try {
        run_command(Command::invert_means, model, overrides);
    } catch (const validity_error& e) {
        refused = true;
        message = e.what();
    }
    require(refused, "complementary transforms must be refused");
    require(message.find("complementary") != std::string::npos,
            "refusal must name the obstruction");
    return "roundtrip " + fmt(roundtrip) + ", complementary transform refused";
}

}  // namespace

int main() {
    Gate gate;
    gate.run("division-relativity", check_division_relativity);
    gate.run("decoupling-transform", check_decoupling);
    gate.run("symplectic-suite", check_symplectic_suite);
    gate.run("oracle-equivalence", check_oracle_equivalence);
    gate.run("noise-shielding", check_shielding);
    gate.run("moment-inversion", check_moment_inversion);

    if (gate.failures == 0) {
        std::printf("all acceptance checks passed\n");
    } else {
        std::printf("%d acceptance check(s) failed\n", gate.failures);
    }
    return gate.failures;
}
