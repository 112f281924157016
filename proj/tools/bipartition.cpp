// Command-line front end: inspect how one quadratic system looks across different
// divisions into subsystems.
//
// Usage: bipartition <command> <model.cfg> [flags]
//
// Exit codes: 0 success, 2 model/usage error, 3 physics validity error,
// 4 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "bipartition/commands.hpp"
#include "bipartition/config.hpp"
#include "bipartition/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidity = 3;
constexpr int kExitNumeric = 4;

struct Invocation {
    bipartition::Command command{};
    std::string model_path;
    bipartition::RunOverrides overrides;
    bool json = false;
};

int run(const Invocation& invocation) {
    const bipartition::CompiledModel model = bipartition::load_model(invocation.model_path);
    const bipartition::Report report =
        bipartition::run_command(invocation.command, model, invocation.overrides);
    if (invocation.json) {
        std::cout << report.json << "\n";
    } else {
        std::cout << report.text;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quadratic systems under different divisions into subsystems"};
    app.require_subcommand(1);

    std::vector<Invocation> invocations;
    const auto add_command = [&](bipartition::Command command, const std::string& description) {
        auto& slot = invocations.emplace_back();
        slot.command = command;
        CLI::App* sub = app.add_subcommand(bipartition::to_string(command), description);
        sub->add_option("model", slot.model_path, "model file (strict JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_flag("--json", slot.json, "emit the machine-readable report");
        sub->add_option("--division", slot.overrides.division,
                        "division name (overrides run.division)");
        sub->add_option("--transform", slot.overrides.transform,
                        "transform name (overrides run.transform)");
        sub->add_option("--tol", slot.overrides.tolerance, "oracle agreement tolerance");
        sub->add_option("--grid", slot.overrides.grid, "oracle grid points per axis");
        sub->add_option("--horizon", slot.overrides.horizon,
                        "evolution duration / search window");
        return sub;
    };
    invocations.reserve(10);

    add_command(bipartition::Command::validate, "Parse and check a model file");
    add_command(bipartition::Command::partition,
                "Split the Hamiltonian along a division: self terms and coupling");
    add_command(bipartition::Command::normal_modes,
                "Decoupling frequencies and mode profiles");
    add_command(bipartition::Command::ground_state, "Ground-state moments and spectrum");
    add_command(bipartition::Command::entangle, "Entanglement measures across one division");
    add_command(bipartition::Command::compare,
                "Entanglement measures across every declared division");
    add_command(bipartition::Command::invert_means,
                "Recover source-frame position moments through a point-like transform");
    add_command(bipartition::Command::evolve,
                "Propagate under the declared noise; track entanglement");
    add_command(bipartition::Command::shield_search,
                "Rank divisions by how fast the noise degrades their entanglement");
    add_command(bipartition::Command::oracle_check,
                "Cross-check the Gaussian measures against the grid oracle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const auto* active = app.get_subcommands().front();
    std::size_t index = 0;
    for (std::size_t i = 0; i < invocations.size(); ++i) {
        if (bipartition::to_string(invocations[i].command) == active->get_name()) {
            index = i;
            break;
        }
    }

    try {
        return run(invocations[index]);
    } catch (const bipartition::config_error& e) {
        std::cerr << "model error:\n" << e.what() << "\n";
        return kExitConfig;
    } catch (const bipartition::validity_error& e) {
        std::cerr << "validity error: " << e.what() << "\n";
        return kExitValidity;
    } catch (const bipartition::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
