#include "bipartition/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <utility>

#include "bipartition/oracle.hpp"

namespace bipartition {

namespace {

using njson = nlohmann::json;  // sorted keys: reports serialize deterministically

njson to_json(const Vector& v) {
    njson out = njson::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

njson to_json(const Matrix& m) {
    njson out = njson::array();
    for (int i = 0; i < m.rows(); ++i) {
        njson row = njson::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

njson modes_json(const std::vector<int>& modes) {
    njson out = njson::array();
    for (int m : modes) out.push_back(m);
    return out;
}

std::ostringstream text_stream() {
    std::ostringstream out;
    out << std::setprecision(10);
    return out;
}

const NamedDivision& pick_division(const CompiledModel& model, const RunOverrides& overrides) {
    if (overrides.division) return model.division_named(*overrides.division);
    if (!model.run.division.empty()) return model.division_named(model.run.division);
    if (model.divisions.size() == 1) return model.divisions.front();
    throw config_error("no division selected; pass --division or set run.division");
}

const NamedTransform& pick_transform(const CompiledModel& model, const RunOverrides& overrides) {
    const auto by_name = [&](const std::string& name) -> const NamedTransform& {
        for (const auto& t : model.transforms) {
            if (t.name == name) return t;
        }
        throw config_error("unknown transform '" + name + "'");
    };
    if (overrides.transform) return by_name(*overrides.transform);
    if (!model.run.transform.empty()) return by_name(model.run.transform);
    if (model.transforms.size() == 1) return model.transforms.front();
    throw config_error("no transform selected; pass --transform or set run.transform");
}

NoiseSpec effective_noise(const CompiledModel& model) {
    if (model.noise) return *model.noise;
    NoiseSpec free;
    free.diffusion = Matrix::Zero(0, 0);
    return free;
}

njson division_report_json(const EntanglementReport& report, const std::string& frame) {
    njson out;
    out["division"] = report.division_name;
    out["frame"] = frame;
    out["first"] = report.first_name;
    out["second"] = report.second_name;
    out["log_negativity"] = report.log_neg;
    out["entropy_first"] = report.entropy_first;
    out["min_ppt_eigenvalue"] = report.min_ppt_eigenvalue;
    out["pure"] = report.pure;
    out["separability"] = to_string(report.separability);
    return out;
}

void division_report_text(std::ostringstream& out, const EntanglementReport& report,
                          const std::string& frame) {
    out << "division '" << report.division_name << "' (frame " << frame << "): "
        << report.first_name << " | " << report.second_name
        << "  E_N = " << report.log_neg << ", reduced entropy = " << report.entropy_first
        << ", min PPT eigenvalue = " << report.min_ppt_eigenvalue << ", "
        << to_string(report.separability) << "\n";
}

// ---------------------------------- commands ---------------------------------

Report run_validate(const CompiledModel& model) {
    njson doc;
    doc["command"] = "validate";
    doc["schema"] = kConfigSchema;
    doc["modes"] = model.system.n_modes();
    njson labels = njson::array();
    for (const auto& label : model.system.labels) labels.push_back(label);
    doc["labels"] = std::move(labels);
    njson masses = njson::array();
    for (double m : model.system.masses) masses.push_back(m);
    doc["masses"] = std::move(masses);

    njson transforms = njson::array();
    for (const auto& t : model.transforms) {
        njson entry;
        entry["name"] = t.name;
        entry["kind"] = to_string(classify_division(t.transform));
        entry["canonicity_residual"] = canonicity_residual(t.transform.S);
        transforms.push_back(std::move(entry));
    }
    doc["transforms"] = std::move(transforms);

    njson divisions = njson::array();
    for (const auto& d : model.divisions) {
        njson entry;
        entry["name"] = d.name;
        entry["frame"] = d.frame;
        njson parts = njson::array();
        for (const auto& [part_name, modes] : d.division.parts) {
            njson part;
            part["name"] = part_name;
            part["modes"] = modes_json(modes);
            parts.push_back(std::move(part));
        }
        entry["parts"] = std::move(parts);
        divisions.push_back(std::move(entry));
    }
    doc["divisions"] = std::move(divisions);

    njson state;
    state["pure"] = is_pure(model.initial_state);
    state["validity_margin"] = validity_margin(model.initial_state);
    doc["state"] = std::move(state);
    doc["noise"] = model.noise.has_value();

    auto out = text_stream();
    out << "model OK: " << model.system.n_modes() << " mode(s)";
    out << " [";
    for (std::size_t i = 0; i < model.system.labels.size(); ++i) {
        out << (i ? ", " : "") << model.system.labels[i];
    }
    out << "], " << model.transforms.size() << " transform(s), " << model.divisions.size()
        << " division(s), state " << (is_pure(model.initial_state) ? "pure" : "mixed")
        << (model.noise ? ", noise declared" : "") << "\n";
    return Report{out.str(), doc.dump(2)};
}

Report run_partition(const CompiledModel& model, const RunOverrides& overrides) {
    const NamedDivision& entry = pick_division(model, overrides);
    const DivisionFrame frame = model.frame_for(entry);
    const QuadraticHamiltonian in_frame =
        transform_hamiltonian(model.hamiltonian, frame.to_frame);
    const PartitionBlocks blocks = partition_blocks(in_frame, entry.division);
    const double scale = std::max(1.0, in_frame.M.cwiseAbs().maxCoeff());
    const bool product_form = blocks.coupling_norm <= 1e-12 * scale;

    njson doc;
    doc["command"] = "partition";
    doc["division"] = entry.name;
    doc["frame"] = entry.frame;
    njson first;
    first["name"] = blocks.first_name;
    first["modes"] = modes_json(entry.division.part_modes(0));
    doc["first"] = std::move(first);
    njson second;
    second["name"] = blocks.second_name;
    second["modes"] = modes_json(entry.division.part_modes(1));
    doc["second"] = std::move(second);
    doc["coupling_norm"] = blocks.coupling_norm;
    doc["product_form"] = product_form;
    doc["hamiltonian_matrix"] = to_json(in_frame.M);

    auto out = text_stream();
    out << "division '" << entry.name << "' (frame " << entry.frame << "): H = H["
        << blocks.first_name << "] + H[" << blocks.second_name << "] + H[coupling]\n"
        << "coupling norm " << blocks.coupling_norm << " -> "
        << (product_form ? "product form; the parts evolve independently"
                         : "coupled; the division mixes the parts' dynamics")
        << "\n";
    return Report{out.str(), doc.dump(2)};
}

Report run_normal_modes(const CompiledModel& model) {
    const NormalModeResult nm = normal_modes(model.hamiltonian);

    njson doc;
    doc["command"] = "normal-modes";
    doc["frequencies"] = to_json(nm.frequencies);
    njson participation = njson::array();
    for (int j = 0; j < nm.participation.cols(); ++j) {
        participation.push_back(to_json(Vector(nm.participation.col(j))));
    }
    doc["participation"] = std::move(participation);
    doc["kind"] = to_string(classify_division(nm.to_normal));
    doc["canonicity_residual"] = canonicity_residual(nm.to_normal.S);

    auto out = text_stream();
    out << "normal modes (descending):\n";
    for (int j = 0; j < nm.frequencies.size(); ++j) {
        out << "  omega = " << nm.frequencies[j] << "  profile [";
        for (int i = 0; i < nm.participation.rows(); ++i) {
            out << (i ? ", " : "") << nm.participation(i, j);
        }
        out << "]\n";
    }
    out << "transform is " << to_string(classify_division(nm.to_normal)) << "\n";
    return Report{out.str(), doc.dump(2)};
}

Report run_ground_state(const CompiledModel& model) {
    const GaussianState ground = ground_state(model.hamiltonian);
    const Vector spectrum = symplectic_spectrum(ground.sigma);

    njson doc;
    doc["command"] = "ground-state";
    doc["mean"] = to_json(ground.mean);
    doc["sigma"] = to_json(ground.sigma);
    doc["symplectic_spectrum"] = to_json(spectrum);
    doc["pure"] = is_pure(ground);
    doc["entropy"] = state_entropy(ground);

    auto out = text_stream();
    out << "ground state: " << ground.n_modes() << " mode(s), "
        << (is_pure(ground) ? "pure" : "mixed") << ", entropy " << state_entropy(ground) << "\n"
        << "position variances:";
    for (int i = 0; i < ground.n_modes(); ++i) {
        out << " " << ground.sigma(i, i);
    }
    out << "\n";
    return Report{out.str(), doc.dump(2)};
}

Report run_entangle(const CompiledModel& model, const RunOverrides& overrides) {
    const NamedDivision& entry = pick_division(model, overrides);
    const DivisionFrame frame = model.frame_for(entry);
    const GaussianState moved = apply_transform(model.initial_state, frame.to_frame);
    const EntanglementReport report = analyze_division(moved, entry.division);

    njson doc = division_report_json(report, entry.frame);
    doc["command"] = "entangle";

    auto out = text_stream();
    division_report_text(out, report, entry.frame);
    return Report{out.str(), doc.dump(2)};
}

Report run_compare(const CompiledModel& model) {
    if (model.divisions.empty()) {
        throw config_error("model declares no divisions to compare");
    }
    std::vector<DivisionFrame> frames;
    frames.reserve(model.divisions.size());
    for (const auto& entry : model.divisions) {
        frames.push_back(model.frame_for(entry));
    }
    const std::vector<EntanglementReport> reports =
        compare_divisions(model.initial_state, frames);

    njson doc;
    doc["command"] = "compare";
    njson results = njson::array();
    auto out = text_stream();
    out << "one state, " << reports.size() << " division(s):\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        results.push_back(division_report_json(reports[i], model.divisions[i].frame));
        out << "  ";
        division_report_text(out, reports[i], model.divisions[i].frame);
    }
    doc["results"] = std::move(results);
    return Report{out.str(), doc.dump(2)};
}

Report run_invert_means(const CompiledModel& model, const RunOverrides& overrides) {
    const NamedTransform& entry = pick_transform(model, overrides);
    const int n = model.system.n_modes();

    // The inversion refuses complementary transforms; surface that refusal
    // before deriving measured moments, whose forward push would fail with a
    // less specific message.
    if (classify_division(entry.transform) == DivisionKind::complementary) {
        invert_moments(Vector::Zero(n), Matrix::Identity(n, n), entry.transform);
    }

    Vector measured_means;
    Matrix measured_cov;
    bool from_model_state = false;
    if (model.run.measured_means && model.run.measured_covariance) {
        measured_means = *model.run.measured_means;
        measured_cov = *model.run.measured_covariance;
    } else if (model.run.measured_means || model.run.measured_covariance) {
        throw config_error(
            "run.measured_means and run.measured_covariance must be given together");
    } else {
        // No measurement supplied: push the model state's own position moments
        // into the target frame and treat those as measured.
        from_model_state = true;
        const PositionMoments pushed = transform_position_moments(
            model.initial_state.mean.head(n), model.initial_state.sigma.topLeftCorner(n, n),
            entry.transform);
        measured_means = pushed.mean;
        measured_cov = pushed.covariance;
    }

    // Refuses complementary transforms with a validity error.
    const PositionMoments inverted = invert_moments(measured_means, measured_cov, entry.transform);
    const PositionMoments roundtrip =
        transform_position_moments(inverted.mean, inverted.covariance, entry.transform);
    const double roundtrip_error =
        std::max((roundtrip.mean - measured_means).cwiseAbs().maxCoeff(),
                 (roundtrip.covariance - measured_cov).cwiseAbs().maxCoeff());

    njson doc;
    doc["command"] = "invert-means";
    doc["transform"] = entry.name;
    doc["kind"] = to_string(classify_division(entry.transform));
    doc["measured_from_state"] = from_model_state;
    njson measured;
    measured["means"] = to_json(measured_means);
    measured["covariance"] = to_json(measured_cov);
    doc["measured"] = std::move(measured);
    njson inverted_json;
    inverted_json["means"] = to_json(inverted.mean);
    inverted_json["covariance"] = to_json(inverted.covariance);
    doc["inverted"] = std::move(inverted_json);
    doc["roundtrip_max_error"] = roundtrip_error;

    auto out = text_stream();
    out << "transform '" << entry.name << "': recovered source-frame position moments from "
        << (from_model_state ? "the model state's moments" : "run.measured_* moments") << "\n"
        << "means:";
    for (int i = 0; i < inverted.mean.size(); ++i) out << " " << inverted.mean[i];
    out << "\nroundtrip max error " << roundtrip_error << "\n";
    return Report{out.str(), doc.dump(2)};
}

Report run_evolve(const CompiledModel& model, const RunOverrides& overrides) {
    const double horizon = overrides.horizon.value_or(model.run.horizon);
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw config_error("evolution horizon must be positive and finite");
    }
    const NoiseSpec noise = effective_noise(model);

    // Entanglement trajectory wants a division; run without one if the model
    // declares none and no default is set.
    const NamedDivision* entry = nullptr;
    if (overrides.division || !model.run.division.empty() || model.divisions.size() == 1) {
        entry = &pick_division(model, overrides);
    }
    std::optional<DivisionFrame> frame;
    if (entry != nullptr) {
        frame = model.frame_for(*entry);
    }

    constexpr int kIntervals = 8;
    njson times = njson::array();
    njson trajectory = njson::array();
    GaussianState current = model.initial_state;
    double initial_log_neg = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
        const double t = horizon * i / kIntervals;
        if (i > 0) {
            current = evolve(current, model.hamiltonian, noise, horizon / kIntervals);
        }
        times.push_back(t);
        if (frame) {
            const double value =
                log_negativity(apply_transform(current, frame->to_frame),
                               frame->division.part_modes(0));
            if (i == 0) initial_log_neg = value;
            trajectory.push_back(value);
        }
    }

    njson doc;
    doc["command"] = "evolve";
    doc["horizon"] = horizon;
    doc["times"] = std::move(times);
    if (frame) {
        doc["division"] = entry->name;
        doc["log_negativity"] = std::move(trajectory);
        if (initial_log_neg > 0.0) {
            const double t_dec = decoherence_time(model.initial_state, model.hamiltonian, noise,
                                                  *frame, horizon);
            if (std::isfinite(t_dec)) {
                doc["decoherence_time"] = t_dec;
            } else {
                doc["decoherence_time"] = nullptr;
                doc["decoherence_note"] = "log negativity stays above 1/e of its initial value "
                                          "within the horizon";
            }
        } else {
            doc["decoherence_time"] = nullptr;
            doc["decoherence_note"] = "division carries no entanglement to lose";
        }
    }
    njson final_state;
    final_state["mean"] = to_json(current.mean);
    final_state["sigma"] = to_json(current.sigma);
    final_state["validity_margin"] = validity_margin(current);
    final_state["pure"] = is_pure(current);
    doc["final"] = std::move(final_state);

    auto out = text_stream();
    out << "evolved to t = " << horizon << " (validity margin "
        << validity_margin(current) << ")\n";
    if (frame) {
        out << "E_N across '" << entry->name << "':";
        for (const auto& value : doc["log_negativity"]) {
            out << " " << value.get<double>();
        }
        out << "\n";
        if (doc["decoherence_time"].is_number()) {
            out << "decoherence time " << doc["decoherence_time"].get<double>() << "\n";
        } else {
            out << "decoherence time: " << doc["decoherence_note"].get<std::string>() << "\n";
        }
    }
    return Report{out.str(), doc.dump(2)};
}

Report run_shield_search(const CompiledModel& model, const RunOverrides& overrides) {
    (void)overrides;
    if (!model.noise) {
        throw config_error("shield search needs a noise section");
    }
    if (model.run.shield_candidates.empty()) {
        throw config_error("no shield candidates declared; set run.shield_candidates");
    }
    std::vector<ShieldCandidate> candidates;
    candidates.reserve(model.run.shield_candidates.size());
    for (const auto& name : model.run.shield_candidates) {
        candidates.push_back(ShieldCandidate{model.frame_for(model.division_named(name))});
    }
    const std::vector<ShieldRanking> rows = shielded_division_search(
        model.initial_state, model.hamiltonian, *model.noise, candidates);

    njson doc;
    doc["command"] = "shield-search";
    njson ranking = njson::array();
    auto out = text_stream();
    out << "divisions ranked by entanglement degradation under the declared noise:\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        njson row;
        row["division"] = rows[i].division_name;
        row["initial_log_negativity"] = rows[i].initial_log_neg;
        row["degradation_rate"] = rows[i].degradation_rate;
        ranking.push_back(std::move(row));
        out << "  " << (i + 1) << ". " << rows[i].division_name << "  E_N(0) = "
            << rows[i].initial_log_neg << ", rate = " << rows[i].degradation_rate << "\n";
    }
    doc["ranking"] = std::move(ranking);
    return Report{out.str(), doc.dump(2)};
}

Report run_oracle_check(const CompiledModel& model, const RunOverrides& overrides) {
    const double tolerance = overrides.tolerance.value_or(1e-3);
    if (!(tolerance > 0.0)) {
        throw config_error("oracle tolerance must be positive");
    }
    GridOptions grid;
    if (overrides.grid) {
        grid.points = *overrides.grid;
    }

    // Optional division: check the cut in that division's frame.
    GaussianState probe = model.initial_state;
    std::string frame_name = kNativeFrame;
    if (overrides.division || !model.run.division.empty()) {
        const NamedDivision& entry = pick_division(model, overrides);
        probe = apply_transform(probe, model.frame_for(entry).to_frame);
        frame_name = entry.frame;
    }

    const double gauss_log_neg = log_negativity(probe, {0});
    const double gauss_entropy = entanglement_entropy(probe, {0});
    const OracleMeasures oracle = oracle_measures(probe, grid);
    const double entropy_diff = std::abs(gauss_entropy - oracle.entropy);
    const double log_neg_diff = std::abs(gauss_log_neg - oracle.log_neg);

    if (entropy_diff > tolerance || log_neg_diff > tolerance) {
        std::ostringstream msg;
        msg << std::setprecision(10) << "oracle disagreement: entropy differs by " << entropy_diff
            << ", log negativity by " << log_neg_diff << " (tolerance " << tolerance << ")";
        throw numeric_error(msg.str());
    }

    njson doc;
    doc["command"] = "oracle-check";
    doc["frame"] = frame_name;
    doc["grid_points"] = grid.points;
    doc["tolerance"] = tolerance;
    njson gauss;
    gauss["entropy"] = gauss_entropy;
    gauss["log_negativity"] = gauss_log_neg;
    doc["gaussian"] = std::move(gauss);
    njson grid_side;
    grid_side["entropy"] = oracle.entropy;
    grid_side["log_negativity"] = oracle.log_neg;
    grid_side["schmidt_sum_sq"] = oracle.schmidt_sum_sq;
    grid_side["expanded"] = oracle.expanded;
    doc["oracle"] = std::move(grid_side);
    njson diff;
    diff["entropy"] = entropy_diff;
    diff["log_negativity"] = log_neg_diff;
    doc["difference"] = std::move(diff);
    doc["agree"] = true;

    auto out = text_stream();
    out << "grid oracle agrees with the covariance measures (grid " << grid.points << ", frame "
        << frame_name << ")\n"
        << "entropy " << gauss_entropy << " vs " << oracle.entropy << " (diff " << entropy_diff
        << ")\n"
        << "log negativity " << gauss_log_neg << " vs " << oracle.log_neg << " (diff "
        << log_neg_diff << ")\n";
    return Report{out.str(), doc.dump(2)};
}

}  // namespace

// --------------------------------- dispatch ----------------------------------

const char* to_string(Command command) {
    switch (command) {
        case Command::validate: return "validate";
        case Command::partition: return "partition";
        case Command::normal_modes: return "normal-modes";
        case Command::ground_state: return "ground-state";
        case Command::entangle: return "entangle";
        case Command::compare: return "compare";
        case Command::invert_means: return "invert-means";
        case Command::evolve: return "evolve";
        case Command::shield_search: return "shield-search";
        case Command::oracle_check: return "oracle-check";
    }
    return "unknown";
}

Command parse_command_name(const std::string& name) {
    static constexpr Command all[] = {
        Command::validate,     Command::partition, Command::normal_modes,
        Command::ground_state, Command::entangle,  Command::compare,
        Command::invert_means, Command::evolve,    Command::shield_search,
        Command::oracle_check,
    };
    for (Command command : all) {
        if (name == to_string(command)) return command;
    }
    throw config_error("unknown command '" + name + "'");
}

Report run_command(Command command, const CompiledModel& model, const RunOverrides& overrides) {
    switch (command) {
        case Command::validate: return run_validate(model);
        case Command::partition: return run_partition(model, overrides);
        case Command::normal_modes: return run_normal_modes(model);
        case Command::ground_state: return run_ground_state(model);
        case Command::entangle: return run_entangle(model, overrides);
        case Command::compare: return run_compare(model);
        case Command::invert_means: return run_invert_means(model, overrides);
        case Command::evolve: return run_evolve(model, overrides);
        case Command::shield_search: return run_shield_search(model, overrides);
        case Command::oracle_check: return run_oracle_check(model, overrides);
    }
    throw config_error("unknown command");
}

}  // namespace bipartition
