#include "bipartition/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

namespace bipartition {

namespace {

using ojson = nlohmann::ordered_json;

// Every problem found is appended here; compilation throws once, at the end,
// with the complete list.
class Issues {
public:
    void add(std::string path, std::string message) {
        list_.push_back(ConfigIssue{std::move(path), std::move(message)});
    }
    bool empty() const { return list_.empty(); }
    void raise_if_any() const {
        if (!list_.empty()) throw config_error(list_);
    }

private:
    std::vector<ConfigIssue> list_;
};

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void check_keys(const ojson& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Issues& issues) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            issues.add(path.empty() ? item.key() : join(path, item.key()), "unknown key");
        }
    }
}

const ojson* member(const ojson& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const ojson* require_member(const ojson& obj, const char* key, const std::string& path,
                            Issues& issues) {
    const ojson* node = member(obj, key);
    if (node == nullptr) {
        issues.add(join(path, key), "required key is missing");
    }
    return node;
}

std::optional<double> as_number(const ojson& node, const std::string& path, Issues& issues) {
    if (!node.is_number()) {
        issues.add(path, "expected a number");
        return std::nullopt;
    }
    const double value = node.get<double>();
    if (!std::isfinite(value)) {
        issues.add(path, "value must be finite");
        return std::nullopt;
    }
    return value;
}

std::optional<std::string> as_string(const ojson& node, const std::string& path, Issues& issues) {
    if (!node.is_string()) {
        issues.add(path, "expected a string");
        return std::nullopt;
    }
    return node.get<std::string>();
}

std::optional<bool> as_bool(const ojson& node, const std::string& path, Issues& issues) {
    if (!node.is_boolean()) {
        issues.add(path, "expected true or false");
        return std::nullopt;
    }
    return node.get<bool>();
}

// expected_size < 0: any length.
std::optional<Vector> as_vector(const ojson& node, const std::string& path, Issues& issues,
                                int expected_size = -1) {
    if (!node.is_array()) {
        issues.add(path, "expected an array of numbers");
        return std::nullopt;
    }
    Vector out(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_number() || !std::isfinite(node[i].get<double>())) {
            issues.add(path, "entries must be finite numbers");
            return std::nullopt;
        }
        out[static_cast<int>(i)] = node[i].get<double>();
    }
    if (expected_size >= 0 && out.size() != expected_size) {
        std::ostringstream msg;
        msg << "expected " << expected_size << " entries, found " << out.size();
        issues.add(path, msg.str());
        return std::nullopt;
    }
    return out;
}

// expected_rows/cols < 0: any rectangular shape.
std::optional<Matrix> as_matrix(const ojson& node, const std::string& path, Issues& issues,
                                int expected_rows = -1, int expected_cols = -1) {
    if (!node.is_array() || node.empty()) {
        issues.add(path, "expected a nonempty array of number rows");
        return std::nullopt;
    }
    const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
    if (cols == 0) {
        issues.add(path, "expected a nonempty array of number rows");
        return std::nullopt;
    }
    Matrix out(node.size(), cols);
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_array() || node[i].size() != cols) {
            issues.add(path, "rows must be arrays of equal length");
            return std::nullopt;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!node[i][j].is_number() || !std::isfinite(node[i][j].get<double>())) {
                issues.add(path, "entries must be finite numbers");
                return std::nullopt;
            }
            out(static_cast<int>(i), static_cast<int>(j)) = node[i][j].get<double>();
        }
    }
    if ((expected_rows >= 0 && out.rows() != expected_rows) ||
        (expected_cols >= 0 && out.cols() != expected_cols)) {
        std::ostringstream msg;
        msg << "expected a " << expected_rows << " x " << expected_cols << " matrix, found "
            << out.rows() << " x " << out.cols();
        issues.add(path, msg.str());
        return std::nullopt;
    }
    return out;
}

std::optional<std::vector<int>> as_mode_list(const ojson& node, const std::string& path,
                                             Issues& issues) {
    if (!node.is_array()) {
        issues.add(path, "expected an array of mode indices");
        return std::nullopt;
    }
    std::vector<int> out;
    out.reserve(node.size());
    for (const auto& entry : node) {
        if (!entry.is_number_integer()) {
            issues.add(path, "mode indices must be integers");
            return std::nullopt;
        }
        out.push_back(entry.get<int>());
    }
    return out;
}

// ------------------------------ section readers ------------------------------

std::optional<ModeSystem> read_system(const ojson& doc, Issues& issues) {
    const ojson* node = require_member(doc, "system", "", issues);
    if (node == nullptr) return std::nullopt;
    if (!node->is_object()) {
        issues.add("system", "expected an object");
        return std::nullopt;
    }
    check_keys(*node, "system", {"labels", "masses"}, issues);

    std::vector<std::string> labels;
    const ojson* labels_node = require_member(*node, "labels", "system", issues);
    if (labels_node != nullptr) {
        if (!labels_node->is_array()) {
            issues.add("system.labels", "expected an array of strings");
            return std::nullopt;
        }
        for (const auto& entry : *labels_node) {
            if (!entry.is_string()) {
                issues.add("system.labels", "entries must be strings");
                return std::nullopt;
            }
            labels.push_back(entry.get<std::string>());
        }
    }
    const ojson* masses_node = require_member(*node, "masses", "system", issues);
    std::optional<Vector> masses;
    if (masses_node != nullptr) {
        masses = as_vector(*masses_node, "system.masses", issues);
    }
    if (labels.empty() || !masses) return std::nullopt;

    try {
        return ModeSystem::make(std::move(labels),
                                std::vector<double>(masses->data(), masses->data() + masses->size()));
    } catch (const std::invalid_argument& e) {
        issues.add("system", e.what());
        return std::nullopt;
    }
}

std::optional<QuadraticHamiltonian> read_hamiltonian(const ojson& doc,
                                                     const std::optional<ModeSystem>& system,
                                                     Issues& issues) {
    const ojson* node = require_member(doc, "hamiltonian", "", issues);
    if (node == nullptr) return std::nullopt;
    if (!node->is_object()) {
        issues.add("hamiltonian", "expected an object");
        return std::nullopt;
    }
    check_keys(*node, "hamiltonian", {"potential", "matrix", "linear"}, issues);

    const ojson* potential = member(*node, "potential");
    const ojson* matrix = member(*node, "matrix");
    if ((potential != nullptr) == (matrix != nullptr)) {
        issues.add("hamiltonian", "exactly one of 'potential' or 'matrix' must be given");
        return std::nullopt;
    }
    if (!system) return std::nullopt;
    const int n = system->n_modes();

    std::optional<QuadraticHamiltonian> h;
    if (potential != nullptr) {
        const auto v = as_matrix(*potential, "hamiltonian.potential", issues, n, n);
        if (!v) return std::nullopt;
        try {
            h = build_hamiltonian(system->masses, *v);
        } catch (const std::invalid_argument& e) {
            issues.add("hamiltonian.potential", e.what());
            return std::nullopt;
        }
    } else {
        const auto m = as_matrix(*matrix, "hamiltonian.matrix", issues, 2 * n, 2 * n);
        if (!m) return std::nullopt;
        if ((*m - m->transpose()).cwiseAbs().maxCoeff() >
            1e-10 * std::max(1.0, m->cwiseAbs().maxCoeff())) {
            issues.add("hamiltonian.matrix", "matrix must be symmetric");
            return std::nullopt;
        }
        h = QuadraticHamiltonian{*m, Vector::Zero(2 * n)};
    }

    if (const ojson* linear = member(*node, "linear"); linear != nullptr && h) {
        const auto b = as_vector(*linear, "hamiltonian.linear", issues, 2 * n);
        if (!b) return std::nullopt;
        h->b = *b;
    }
    return h;
}

void read_transforms(const ojson& doc, const std::optional<ModeSystem>& system,
                     const std::optional<QuadraticHamiltonian>& h,
                     std::vector<NamedTransform>& out, Issues& issues) {
    const ojson* node = member(doc, "transforms");
    if (node == nullptr) return;
    if (!node->is_object()) {
        issues.add("transforms", "expected an object of named transforms");
        return;
    }
    const int n = system ? system->n_modes() : -1;

    for (const auto& item : node->items()) {
        const std::string& name = item.key();
        const std::string path = join("transforms", name);
        if (name == kNativeFrame) {
            issues.add(path, "'native' is reserved for the identity frame");
            continue;
        }
        const ojson& body = item.value();
        if (!body.is_object()) {
            issues.add(path, "expected an object");
            continue;
        }
        check_keys(body, path, {"builder", "matrix", "masses", "displacement", "inverse"}, issues);

        const ojson* builder_node = require_member(body, "builder", path, issues);
        if (builder_node == nullptr) continue;
        const auto builder = as_string(*builder_node, join(path, "builder"), issues);
        if (!builder) continue;

        std::optional<bool> inverse;
        if (const ojson* inv = member(body, "inverse"); inv != nullptr) {
            inverse = as_bool(*inv, join(path, "inverse"), issues);
        }

        std::optional<SymplecticTransform> built;
        try {
            if (*builder == "two_body") {
                double m1 = 0.0;
                double m2 = 0.0;
                if (const ojson* masses = member(body, "masses"); masses != nullptr) {
                    const auto pair = as_vector(*masses, join(path, "masses"), issues, 2);
                    if (!pair) continue;
                    m1 = (*pair)[0];
                    m2 = (*pair)[1];
                } else if (system && n == 2) {
                    m1 = system->masses[0];
                    m2 = system->masses[1];
                } else {
                    issues.add(path, "two_body needs explicit 'masses' unless the system has "
                                     "exactly two modes");
                    continue;
                }
                built = two_body_transform(m1, m2);
            } else if (*builder == "normal_modes") {
                if (!h) continue;
                built = normal_modes(*h).to_normal;
            } else if (*builder == "point") {
                const ojson* matrix = require_member(body, "matrix", path, issues);
                if (matrix == nullptr) continue;
                const auto t = as_matrix(*matrix, join(path, "matrix"), issues, n, n);
                if (!t) continue;
                built = extend_point_transform(*t);
            } else if (*builder == "matrix") {
                const ojson* matrix = require_member(body, "matrix", path, issues);
                if (matrix == nullptr) continue;
                const auto s =
                    as_matrix(*matrix, join(path, "matrix"), issues, n < 0 ? -1 : 2 * n,
                              n < 0 ? -1 : 2 * n);
                if (!s) continue;
                SymplecticTransform raw = make_transform(*s);
                if (const ojson* disp = member(body, "displacement"); disp != nullptr) {
                    const auto d = as_vector(*disp, join(path, "displacement"), issues,
                                             static_cast<int>(s->rows()));
                    if (!d) continue;
                    raw.d = *d;
                }
                const double residual = canonicity_residual(raw.S);
                if (residual > kCanonicalTol) {
                    std::ostringstream msg;
                    msg << "matrix is not canonical: residual " << residual << " exceeds "
                        << kCanonicalTol;
                    issues.add(join(path, "matrix"), msg.str());
                    continue;
                }
                built = std::move(raw);
            } else {
                issues.add(join(path, "builder"),
                           "unknown builder '" + *builder +
                               "' (expected two_body, normal_modes, point, or matrix)");
                continue;
            }
        } catch (const std::exception& e) {
            issues.add(path, e.what());
            continue;
        }

        if (n > 0 && built->n_modes() != n) {
            issues.add(path, "transform mode count does not match the system");
            continue;
        }
        if (inverse.value_or(false)) {
            built = symplectic_inverse(*built);
        }
        built->source_division = kNativeFrame;
        built->target_division = name;
        out.push_back(NamedTransform{name, std::move(*built)});
    }
}

void read_divisions(const ojson& doc, const std::optional<ModeSystem>& system,
                    const std::vector<NamedTransform>& transforms,
                    std::vector<NamedDivision>& out, Issues& issues) {
    const ojson* node = member(doc, "divisions");
    if (node == nullptr) return;
    if (!node->is_object()) {
        issues.add("divisions", "expected an object of named divisions");
        return;
    }
    for (const auto& item : node->items()) {
        const std::string& name = item.key();
        const std::string path = join("divisions", name);
        const ojson& body = item.value();
        if (!body.is_object()) {
            issues.add(path, "expected an object");
            continue;
        }
        check_keys(body, path, {"frame", "parts"}, issues);

        std::string frame = kNativeFrame;
        if (const ojson* frame_node = member(body, "frame"); frame_node != nullptr) {
            const auto value = as_string(*frame_node, join(path, "frame"), issues);
            if (!value) continue;
            frame = *value;
        }
        if (frame != kNativeFrame) {
            bool found = false;
            for (const auto& t : transforms) {
                if (t.name == frame) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                issues.add(join(path, "frame"), "unknown transform '" + frame + "'");
                continue;
            }
        }

        const ojson* parts_node = require_member(body, "parts", path, issues);
        if (parts_node == nullptr) continue;
        if (!parts_node->is_object() || parts_node->empty()) {
            issues.add(join(path, "parts"), "expected a nonempty object of mode lists");
            continue;
        }
        std::vector<std::pair<std::string, std::vector<int>>> parts;
        bool ok = true;
        for (const auto& part : parts_node->items()) {
            const auto modes = as_mode_list(part.value(), join(join(path, "parts"), part.key()),
                                            issues);
            if (!modes) {
                ok = false;
                break;
            }
            parts.emplace_back(part.key(), *modes);
        }
        if (!ok || !system) continue;

        try {
            DivisionSpec spec = DivisionSpec::make(name, std::move(parts), system->n_modes());
            out.push_back(NamedDivision{name, std::move(frame), std::move(spec)});
        } catch (const std::invalid_argument& e) {
            issues.add(path, e.what());
        }
    }
}

const SymplecticTransform* find_transform(const std::vector<NamedTransform>& transforms,
                                          const std::string& name) {
    for (const auto& t : transforms) {
        if (t.name == name) return &t.transform;
    }
    return nullptr;
}

std::optional<GaussianState> read_state(const ojson& doc, const std::optional<ModeSystem>& system,
                                        const std::optional<QuadraticHamiltonian>& h,
                                        const std::vector<NamedTransform>& transforms,
                                        Issues& issues) {
    const ojson* node = member(doc, "state");
    if (node == nullptr) {
        // Default preparation: the global ground state.
        if (!h) return std::nullopt;
        try {
            return ground_state(*h);
        } catch (const std::exception& e) {
            issues.add("state", std::string("default ground-state preparation failed: ") +
                                    e.what());
            return std::nullopt;
        }
    }
    if (!node->is_object()) {
        issues.add("state", "expected an object");
        return std::nullopt;
    }
    check_keys(*node, "state",
               {"prepare", "frame", "center_width", "center_width_scale", "mean", "covariance"},
               issues);

    const ojson* prepare_node = require_member(*node, "prepare", "state", issues);
    if (prepare_node == nullptr) return std::nullopt;
    const auto prepare = as_string(*prepare_node, "state.prepare", issues);
    if (!prepare) return std::nullopt;

    const auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* key : keys) {
            if (member(*node, key) != nullptr) {
                issues.add(join("state", key),
                           "not a valid key for prepare = '" + *prepare + "'");
            }
        }
    };

    if (!system) return std::nullopt;
    const int n = system->n_modes();

    if (*prepare == "ground") {
        forbid({"frame", "center_width", "center_width_scale", "mean", "covariance"});
        if (!h) return std::nullopt;
        try {
            return ground_state(*h);
        } catch (const std::exception& e) {
            issues.add("state", e.what());
            return std::nullopt;
        }
    }
    if (*prepare == "vacuum") {
        forbid({"frame", "center_width", "center_width_scale", "mean", "covariance"});
        return vacuum_state(n);
    }
    if (*prepare == "moments") {
        forbid({"frame", "center_width", "center_width_scale"});
        const ojson* mean_node = require_member(*node, "mean", "state", issues);
        const ojson* cov_node = require_member(*node, "covariance", "state", issues);
        if (mean_node == nullptr || cov_node == nullptr) return std::nullopt;
        const auto mean = as_vector(*mean_node, "state.mean", issues, 2 * n);
        const auto cov = as_matrix(*cov_node, "state.covariance", issues, 2 * n, 2 * n);
        if (!mean || !cov) return std::nullopt;
        try {
            return make_state(*mean, *cov);
        } catch (const std::exception& e) {
            issues.add("state", e.what());
            return std::nullopt;
        }
    }
    if (*prepare == "product_center") {
        forbid({"mean", "covariance"});
        if (!h) return std::nullopt;

        std::string frame = kNativeFrame;
        if (const ojson* frame_node = member(*node, "frame"); frame_node != nullptr) {
            const auto value = as_string(*frame_node, "state.frame", issues);
            if (!value) return std::nullopt;
            frame = *value;
        }
        SymplecticTransform to_frame = identity_transform(n);
        if (frame != kNativeFrame) {
            const SymplecticTransform* found = find_transform(transforms, frame);
            if (found == nullptr) {
                issues.add("state.frame", "unknown transform '" + frame + "'");
                return std::nullopt;
            }
            to_frame = *found;
        }

        const ojson* width_node = member(*node, "center_width");
        const ojson* scale_node = member(*node, "center_width_scale");
        if ((width_node != nullptr) == (scale_node != nullptr)) {
            issues.add("state", "exactly one of 'center_width' or 'center_width_scale' must be "
                                "given for prepare = 'product_center'");
            return std::nullopt;
        }
        try {
            double width = 0.0;
            if (width_node != nullptr) {
                const auto value = as_number(*width_node, "state.center_width", issues);
                if (!value) return std::nullopt;
                width = *value;
            } else {
                const auto scale = as_number(*scale_node, "state.center_width_scale", issues);
                if (!scale) return std::nullopt;
                if (n != 2) {
                    issues.add("state.center_width_scale",
                               "width scales are relative to the ground width of the remaining "
                               "mode, which is only defined for two-mode systems");
                    return std::nullopt;
                }
                // Ground width of the non-center mode in the chosen frame.
                const QuadraticHamiltonian in_frame = transform_hamiltonian(*h, to_frame);
                QuadraticHamiltonian rest{Matrix(2, 2), Vector::Zero(2)};
                rest.M << in_frame.M(1, 1), in_frame.M(1, 3),  //
                    in_frame.M(3, 1), in_frame.M(3, 3);
                rest.b << in_frame.b[1], in_frame.b[3];
                const GaussianState rest_ground = ground_state(rest);
                width = *scale * std::sqrt(rest_ground.sigma(0, 0));
            }
            return prepare_product_center(*h, to_frame, width);
        } catch (const std::exception& e) {
            issues.add("state", e.what());
            return std::nullopt;
        }
    }
    issues.add("state.prepare", "unknown preparation '" + *prepare +
                                    "' (expected ground, vacuum, product_center, or moments)");
    return std::nullopt;
}

std::optional<NoiseSpec> read_noise(const ojson& doc, const std::optional<ModeSystem>& system,
                                    Issues& issues) {
    const ojson* node = member(doc, "noise");
    if (node == nullptr) return std::nullopt;
    if (!node->is_object()) {
        issues.add("noise", "expected an object");
        return std::nullopt;
    }
    check_keys(*node, "noise", {"targets", "diffusion", "damping"}, issues);

    const ojson* targets_node = require_member(*node, "targets", "noise", issues);
    if (targets_node == nullptr) return std::nullopt;
    const auto targets = as_mode_list(*targets_node, "noise.targets", issues);
    if (!targets) return std::nullopt;
    if (targets->empty()) {
        issues.add("noise.targets", "expected at least one target mode");
        return std::nullopt;
    }
    const int k = static_cast<int>(targets->size());

    const ojson* diffusion_node = require_member(*node, "diffusion", "noise", issues);
    if (diffusion_node == nullptr) return std::nullopt;
    const auto diffusion = as_matrix(*diffusion_node, "noise.diffusion", issues, 2 * k, 2 * k);
    if (!diffusion) return std::nullopt;

    NoiseSpec noise;
    noise.target_modes = *targets;
    noise.diffusion = *diffusion;
    if (const ojson* damping_node = member(*node, "damping"); damping_node != nullptr) {
        const auto damping = as_number(*damping_node, "noise.damping", issues);
        if (!damping) return std::nullopt;
        noise.damping = *damping;
    }

    if (system) {
        try {
            embed_noise(noise, system->n_modes());
        } catch (const std::invalid_argument& e) {
            issues.add("noise", e.what());
            return std::nullopt;
        }
    }
    return noise;
}

RunOptions read_run(const ojson& doc, const std::optional<ModeSystem>& system,
                    const std::vector<NamedTransform>& transforms,
                    const std::vector<NamedDivision>& divisions, Issues& issues) {
    RunOptions run;
    const ojson* node = member(doc, "run");
    if (node == nullptr) return run;
    if (!node->is_object()) {
        issues.add("run", "expected an object");
        return run;
    }
    check_keys(*node, "run",
               {"division", "transform", "horizon", "shield_candidates", "measured_means",
                "measured_covariance"},
               issues);

    const auto known_division = [&](const std::string& name) {
        for (const auto& d : divisions) {
            if (d.name == name) return true;
        }
        return false;
    };

    if (const ojson* division = member(*node, "division"); division != nullptr) {
        if (const auto value = as_string(*division, "run.division", issues)) {
            if (!known_division(*value)) {
                issues.add("run.division", "unknown division '" + *value + "'");
            } else {
                run.division = *value;
            }
        }
    }
    if (const ojson* transform = member(*node, "transform"); transform != nullptr) {
        if (const auto value = as_string(*transform, "run.transform", issues)) {
            if (find_transform(transforms, *value) == nullptr) {
                issues.add("run.transform", "unknown transform '" + *value + "'");
            } else {
                run.transform = *value;
            }
        }
    }
    if (const ojson* horizon = member(*node, "horizon"); horizon != nullptr) {
        if (const auto value = as_number(*horizon, "run.horizon", issues)) {
            if (!(*value > 0.0)) {
                issues.add("run.horizon", "horizon must be positive");
            } else {
                run.horizon = *value;
            }
        }
    }
    if (const ojson* cands = member(*node, "shield_candidates"); cands != nullptr) {
        if (!cands->is_array() || cands->empty()) {
            issues.add("run.shield_candidates", "expected a nonempty array of division names");
        } else {
            for (const auto& entry : *cands) {
                if (!entry.is_string()) {
                    issues.add("run.shield_candidates", "entries must be division names");
                    break;
                }
                const std::string name = entry.get<std::string>();
                if (!known_division(name)) {
                    issues.add("run.shield_candidates", "unknown division '" + name + "'");
                } else {
                    run.shield_candidates.push_back(name);
                }
            }
        }
    }
    const int n = system ? system->n_modes() : -1;
    if (const ojson* means = member(*node, "measured_means"); means != nullptr) {
        run.measured_means = as_vector(*means, "run.measured_means", issues, n);
    }
    if (const ojson* cov = member(*node, "measured_covariance"); cov != nullptr) {
        run.measured_covariance = as_matrix(*cov, "run.measured_covariance", issues, n, n);
        if (run.measured_covariance &&
            (*run.measured_covariance - run.measured_covariance->transpose())
                    .cwiseAbs()
                    .maxCoeff() > 1e-10 * std::max(1.0, run.measured_covariance->cwiseAbs()
                                                            .maxCoeff())) {
            issues.add("run.measured_covariance", "matrix must be symmetric");
            run.measured_covariance.reset();
        }
    }
    return run;
}

CompiledModel compile(const ojson& doc, const std::string& origin) {
    Issues issues;
    if (!doc.is_object()) {
        issues.add(origin, "top level must be a JSON object");
        issues.raise_if_any();
    }
    check_keys(doc, "",
               {"schema", "system", "hamiltonian", "transforms", "divisions", "state", "noise",
                "run"},
               issues);

    if (const ojson* schema = require_member(doc, "schema", "", issues); schema != nullptr) {
        if (!schema->is_number_integer() || schema->get<int>() != kConfigSchema) {
            std::ostringstream msg;
            msg << "unsupported schema version; this build reads " << kConfigSchema;
            issues.add("schema", msg.str());
        }
    }

    const std::optional<ModeSystem> system = read_system(doc, issues);
    const std::optional<QuadraticHamiltonian> h = read_hamiltonian(doc, system, issues);

    std::vector<NamedTransform> transforms;
    read_transforms(doc, system, h, transforms, issues);

    std::vector<NamedDivision> divisions;
    read_divisions(doc, system, transforms, divisions, issues);

    const std::optional<GaussianState> state = read_state(doc, system, h, transforms, issues);
    std::optional<NoiseSpec> noise = read_noise(doc, system, issues);
    RunOptions run = read_run(doc, system, transforms, divisions, issues);

    issues.raise_if_any();

    CompiledModel model;
    model.system = *system;
    model.hamiltonian = *h;
    model.transforms = std::move(transforms);
    model.divisions = std::move(divisions);
    model.initial_state = *state;
    model.noise = std::move(noise);
    model.run = std::move(run);
    return model;
}

ojson parse_text(const std::string& text, const std::string& origin) {
    try {
        return ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        // The parser's message already carries line and column; strip the
        // bracketed exception id it prepends.
        std::string message = e.what();
        if (const auto pos = message.find("] "); pos != std::string::npos) {
            message = message.substr(pos + 2);
        }
        throw config_error({ConfigIssue{origin, message}});
    }
}

}  // namespace

// ------------------------------ compiled model -------------------------------

const SymplecticTransform& CompiledModel::transform_named(const std::string& name) const {
    const SymplecticTransform* found = find_transform(transforms, name);
    if (found == nullptr) {
        throw config_error("unknown transform '" + name + "'");
    }
    return *found;
}

const NamedDivision& CompiledModel::division_named(const std::string& name) const {
    for (const auto& d : divisions) {
        if (d.name == name) return d;
    }
    throw config_error("unknown division '" + name + "'");
}

DivisionFrame CompiledModel::frame_for(const NamedDivision& entry) const {
    DivisionFrame frame;
    frame.division = entry.division;
    frame.to_frame = entry.frame == kNativeFrame ? identity_transform(system.n_modes())
                                                 : transform_named(entry.frame);
    return frame;
}

// --------------------------------- loading -----------------------------------

CompiledModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw config_error({ConfigIssue{path, "cannot open model file"}});
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return compile(parse_text(buffer.str(), path), path);
}

CompiledModel load_model_text(const std::string& text, const std::string& origin) {
    return compile(parse_text(text, origin), origin);
}

}  // namespace bipartition
