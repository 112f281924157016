// Model files: parsing, semantic checks, compiled scene.
//
// A model file is strict JSON (conventionally *.cfg) describing one mode
// system, its Hamiltonian, named coordinate transforms, named divisions, the
// prepared state, and optional noise plus run defaults. Parsing and
// compilation collect *every* problem they can find and throw a single
// config_error carrying the full issue list; first-error-only diagnostics
// waste round trips.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bipartition/entanglement.hpp"
#include "bipartition/gaussian_state.hpp"
#include "bipartition/hamiltonian.hpp"
#include "bipartition/open_system.hpp"
#include "bipartition/phase_space.hpp"

namespace bipartition {

// Model files must declare this version.
inline constexpr int kConfigSchema = 1;

// Reserved frame name: the identity transform on the native modes.
inline constexpr const char* kNativeFrame = "native";

struct NamedTransform {
    std::string name;
    SymplecticTransform transform;
};

struct NamedDivision {
    std::string name;
    std::string frame;   // transform name, or "native"
    DivisionSpec division;
};

/// Run-section defaults; CLI flags override them per invocation.
struct RunOptions {
    std::string division;                       // default division for single-division commands
    std::string transform;                      // transform for invert-means
    double horizon = 20.0;                      // decoherence-time search window
    std::vector<std::string> shield_candidates; // division names, ranking order on ties
    std::optional<Vector> measured_means;       // position means, target frame of `transform`
    std::optional<Matrix> measured_covariance;  // position covariance, same frame
};

/// Fully validated scene: every matrix canonical, every name resolved, the
/// initial state prepared. Construction succeeds only through load_model*.
struct CompiledModel {
    ModeSystem system;
    QuadraticHamiltonian hamiltonian;
    std::vector<NamedTransform> transforms;   // declaration order
    std::vector<NamedDivision> divisions;     // declaration order
    GaussianState initial_state;
    std::optional<NoiseSpec> noise;
    RunOptions run;

    const SymplecticTransform& transform_named(const std::string& name) const;
    const NamedDivision& division_named(const std::string& name) const;

    /// Division plus the transform reaching its frame ("native" -> identity).
    DivisionFrame frame_for(const NamedDivision& entry) const;
};

/// Parses and compiles a model file. Throws config_error with the full issue
/// list on any problem: JSON syntax (with line numbers), unknown keys, wrong
/// types, missing sections, unresolved names, non-canonical matrices,
/// unphysical states.
CompiledModel load_model(const std::string& path);

/// Same, from an in-memory document; `origin` names it in diagnostics.
CompiledModel load_model_text(const std::string& text, const std::string& origin = "<inline>");

}  // namespace bipartition
