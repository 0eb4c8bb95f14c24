// Copyright 2026 The backaction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "backaction/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "backaction/errors.hpp"

namespace backaction {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

struct ModeName {
    Mode mode;
    std::string_view name;
};

constexpr ModeName kModeNames[] = {
    {Mode::AnalyticQubit, "analytic-qubit"}, {Mode::OptimizeMeasurements, "optimize-measurements"},
    {Mode::OptimizeJoint, "optimize-joint"}, {Mode::BruteForce, "brute-force"},
    {Mode::Evaluate, "evaluate"},
};

[[noreturn]] void fail(const std::string& message) { throw ValidationError(message); }

std::string join_path(std::string_view parent, std::string_view key) {
    if (parent.empty()) return std::string(key);
    return std::string(parent) + "." + std::string(key);
}

void check_keys(const Json& obj, std::string_view path, std::initializer_list<std::string_view> allowed) {
    std::string unknown;
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) {
        fail("unknown keys in " + (path.empty() ? std::string("scenario") : std::string(path)) + ": " + unknown);
    }
}

const Json& require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path + " must be an object");
    return j;
}

double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path + " must be a number");
    return j.get<double>();
}

int as_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path + " must be an integer");
    return j.get<int>();
}

BlochVector as_triple(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) fail(path + " must be an array of three numbers");
    return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]"), as_number(j[2], path + "[2]")};
}

Complex as_complex(const Json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(path + " must be a [re, im] pair");
    return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
}

MatrixLiteral as_matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail("schema error: " + path + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    for (const auto& row : j) {
        if (!row.is_array()) fail("schema error: " + path + " rows must be arrays");
    }
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    for (const auto& row : j) {
        if (static_cast<Eigen::Index>(row.size()) != cols) fail("schema error: " + path + " has ragged rows");
    }
    if (rows != cols) {
        std::ostringstream os;
        os << "schema error: " << path << " must be square, got " << rows << "x" << cols;
        fail(os.str());
    }
    MatrixLiteral m{ComplexMatrix(rows, cols)};
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            std::ostringstream entry;
            entry << path << "[" << r << "][" << c << "]";
            m.value(r, c) = as_complex(j[r][c], entry.str());
        }
    }
    return m;
}

OperatorInput as_operator(const Json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"bloch", "matrix"});
    if (j.contains("bloch") == j.contains("matrix")) fail(path + " needs exactly one of 'bloch' or 'matrix'");
    if (j.contains("bloch")) return as_triple(j["bloch"], path + ".bloch");
    return as_matrix(j["matrix"], path + ".matrix");
}

OrderedJson matrix_json(const ComplexMatrix& m) {
    OrderedJson rows = OrderedJson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        OrderedJson row = OrderedJson::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

OrderedJson triple_json(const BlochVector& b) { return {b.x, b.y, b.z}; }

OrderedJson operator_json(const OperatorInput& in) {
    OrderedJson out = OrderedJson::object();
    if (const auto* b = std::get_if<BlochVector>(&in)) {
        out["bloch"] = triple_json(*b);
    } else {
        out["matrix"] = matrix_json(std::get<MatrixLiteral>(in).value);
    }
    return out;
}

std::string shape_of(const ComplexMatrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void check_dim(const ScenarioConfig& c, const ComplexMatrix& m, const std::string& field) {
    if (m.rows() != c.dim) {
        std::ostringstream os;
        os << "dimension mismatch: dim = " << c.dim << " but " << field << " is " << shape_of(m);
        fail(os.str());
    }
}

void check_hermitian(const ComplexMatrix& m, const std::string& field) {
    const double violation = hermiticity_violation(m);
    if (!(violation <= tolerance::kHermitian)) {
        std::ostringstream os;
        os << field << " is not Hermitian: max |M - M^dagger| = " << violation;
        fail(os.str());
    }
}

void check_two_level(const ScenarioConfig& c, const std::string& field) {
    if (c.dim != 2) {
        std::ostringstream os;
        os << "dimension mismatch: " << field << " requires dim = 2 but dim = " << c.dim;
        fail(os.str());
    }
}

void check_ball(const BlochVector& b, const std::string& field) {
    if (!(b.norm() <= 1.0 + kUnitNormTolerance)) {
        std::ostringstream os;
        os << field << " lies outside the unit ball: |b| = " << b.norm();
        fail(os.str());
    }
}

void check_unit(const BlochVector& b, const std::string& field) {
    if (!(std::abs(b.norm() - 1.0) <= kUnitNormTolerance)) {
        std::ostringstream os;
        os << field << " must have unit norm, got " << b.norm();
        fail(os.str());
    }
}

void validate(const ScenarioConfig& c) {
    const std::string mode(to_string(c.mode));
    auto require_mode = [&](bool ok, const std::string& what) {
        if (!ok) fail("mode '" + mode + "' " + what);
    };

    if (c.dim < 1) fail("dim must be positive");

    if (const auto* b = std::get_if<BlochVector>(&c.initial_state)) {
        check_two_level(c, "initial_state.bloch");
        check_ball(*b, "initial_state.bloch");
    } else {
        const auto& m = std::get<MatrixLiteral>(c.initial_state).value;
        check_dim(c, m, "initial_state.matrix");
        try {
            DensityMatrix{m};
        } catch (const ValidationError& e) {
            fail(std::string("initial_state.matrix: ") + e.what());
        }
    }
    if (const auto* b = std::get_if<BlochVector>(&c.target)) {
        check_two_level(c, "target.bloch");
        check_ball(*b, "target.bloch");
    } else {
        const auto& m = std::get<MatrixLiteral>(c.target).value;
        check_dim(c, m, "target.matrix");
        check_hermitian(m, "target.matrix");
    }

    if (c.n_measurements < 0) fail("n_measurements must be non-negative");

    if (c.model) {
        check_dim(c, c.model->h0.value, "model.h0");
        check_dim(c, c.model->mu.value, "model.mu");
        check_hermitian(c.model->h0.value, "model.h0");
        check_hermitian(c.model->mu.value, "model.mu");
    }
    if (c.controls) {
        if (c.controls->segments_per_gap < 1) fail("controls.segments_per_gap must be at least 1");
        if (!(c.controls->dt > 0.0)) fail("controls.dt must be positive");
        if (!(c.controls->u_max > 0.0)) fail("controls.u_max must be positive");
    }

    if (!c.plan.directions.empty() && !c.plan.observables.empty()) {
        fail("plan needs at most one of 'directions' or 'observables'");
    }
    for (std::size_t i = 0; i < c.plan.directions.size(); ++i) {
        check_two_level(c, "plan.directions");
        check_unit(c.plan.directions[i], "plan.directions[" + std::to_string(i) + "]");
    }
    for (std::size_t i = 0; i < c.plan.observables.size(); ++i) {
        const std::string field = "plan.observables[" + std::to_string(i) + "]";
        check_dim(c, c.plan.observables[i].value, field);
        check_hermitian(c.plan.observables[i].value, field);
    }

    const auto& opt = c.optimizer;
    if (!(opt.tolerance >= 0.0)) fail("optimizer.tolerance must be non-negative");
    if (opt.max_iters < 1) fail("optimizer.max_iters must be at least 1");
    if (opt.multi_starts < 1) fail("optimizer.multi_starts must be at least 1");
    if (opt.grid_points < 8) fail("optimizer.grid_points must be at least 8");
    if (c.output.trajectory_path.empty()) fail("output.trajectory_path must be non-empty");
    if (c.output.summary_path.empty()) fail("output.summary_path must be non-empty");

    switch (c.mode) {
        case Mode::AnalyticQubit:
            check_two_level(c, "mode 'analytic-qubit'");
            require_mode(std::holds_alternative<BlochVector>(c.initial_state) &&
                             std::holds_alternative<BlochVector>(c.target),
                         "requires Bloch triples for initial_state and target");
            check_unit(std::get<BlochVector>(c.initial_state), "initial_state.bloch");
            check_unit(std::get<BlochVector>(c.target), "target.bloch");
            require_mode(c.n_measurements >= 1, "requires n_measurements >= 1");
            if (c.analytic.plane_hint && c.analytic.plane_hint->norm() == 0.0) {
                fail("analytic.plane_hint must be non-zero");
            }
            break;
        case Mode::OptimizeMeasurements:
            require_mode(c.n_measurements >= 1, "requires n_measurements >= 1");
            break;
        case Mode::OptimizeJoint:
            require_mode(c.model.has_value(), "requires field 'model'");
            break;
        case Mode::BruteForce:
            check_two_level(c, "mode 'brute-force'");
            break;
        case Mode::Evaluate: {
            const auto plan_size = std::max(c.plan.directions.size(), c.plan.observables.size());
            if (static_cast<std::size_t>(c.n_measurements) != plan_size) {
                std::ostringstream os;
                os << "n_measurements = " << c.n_measurements << " but the plan holds " << plan_size
                   << " measurements";
                fail(os.str());
            }
            if (c.controls && !c.controls->amplitudes.empty()) {
                require_mode(c.model.has_value(), "requires field 'model' when controls.amplitudes are given");
                if (c.controls->amplitudes.size() != plan_size + 1) {
                    std::ostringstream os;
                    os << "controls.amplitudes needs " << plan_size + 1 << " gaps, got "
                       << c.controls->amplitudes.size();
                    fail(os.str());
                }
            }
            break;
        }
    }
}

ComplexMatrix operator_matrix(const OperatorInput& in) {
    if (const auto* b = std::get_if<BlochVector>(&in)) return bloch_operator(*b).matrix();
    return std::get<MatrixLiteral>(in).value;
}

std::string format_real(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", v);
    return buffer;
}

void write_file(const std::filesystem::path& path, const std::string& contents, const char* what) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError(std::string("cannot create directory for ") + what + " '" + path.string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(std::string("cannot open ") + what + " '" + path.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError(std::string("failed writing ") + what + " '" + path.string() + "'");
}

template <class E>
[[noreturn]] void rethrow_with_context(const E& e, Mode mode) {
    throw E("scenario '" + std::string(to_string(mode)) + "': " + e.what());
}

}  // namespace

std::string_view to_string(Mode mode) {
    for (const auto& m : kModeNames) {
        if (m.mode == mode) return m.name;
    }
    return "unknown";
}

Mode mode_from_string(std::string_view name) {
    for (const auto& m : kModeNames) {
        if (m.name == name) return m.mode;
    }
    fail("unknown mode '" + std::string(name) +
         "' (expected analytic-qubit, optimize-measurements, optimize-joint, brute-force or evaluate)");
}

std::string_view to_string(AnalyticConstruction c) {
    return c == AnalyticConstruction::Optimal ? "optimal" : "equal-time";
}

bool operator==(const MatrixLiteral& a, const MatrixLiteral& b) {
    return a.value.rows() == b.value.rows() && a.value.cols() == b.value.cols() &&
           (a.value.array() == b.value.array()).all();
}

ScenarioConfig parse_scenario(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(std::string("malformed scenario document: ") + e.what());
    }
    require_object(doc, "scenario");
    check_keys(doc, "", {"mode", "dim", "initial_state", "target", "n_measurements", "model", "controls", "plan",
                         "analytic", "optimizer", "output"});

    ScenarioConfig c;
    if (!doc.contains("mode") || !doc["mode"].is_string()) fail("missing required string field 'mode'");
    c.mode = mode_from_string(doc["mode"].get<std::string>());
    if (doc.contains("dim")) c.dim = as_int(doc["dim"], "dim");
    if (!doc.contains("initial_state")) fail("missing required field 'initial_state'");
    c.initial_state = as_operator(doc["initial_state"], "initial_state");
    if (!doc.contains("target")) fail("missing required field 'target'");
    c.target = as_operator(doc["target"], "target");

    if (doc.contains("n_measurements")) {
        c.n_measurements = as_int(doc["n_measurements"], "n_measurements");
    } else if (c.mode != Mode::Evaluate) {
        fail("missing required field 'n_measurements'");
    }

    if (doc.contains("model")) {
        const Json& m = require_object(doc["model"], "model");
        check_keys(m, "model", {"h0", "mu"});
        if (!m.contains("h0") || !m.contains("mu")) fail("model needs both 'h0' and 'mu'");
        c.model = ModelInput{as_matrix(m["h0"], "model.h0"), as_matrix(m["mu"], "model.mu")};
    }
    if (doc.contains("controls")) {
        const Json& j = require_object(doc["controls"], "controls");
        check_keys(j, "controls", {"segments_per_gap", "dt", "u_max", "amplitudes"});
        ControlsInput ctl;
        if (j.contains("segments_per_gap")) ctl.segments_per_gap = as_int(j["segments_per_gap"], "controls.segments_per_gap");
        if (j.contains("dt")) ctl.dt = as_number(j["dt"], "controls.dt");
        if (j.contains("u_max")) ctl.u_max = as_number(j["u_max"], "controls.u_max");
        if (j.contains("amplitudes")) {
            if (!j["amplitudes"].is_array()) fail("controls.amplitudes must be an array of arrays");
            for (std::size_t g = 0; g < j["amplitudes"].size(); ++g) {
                const Json& gap = j["amplitudes"][g];
                const std::string path = "controls.amplitudes[" + std::to_string(g) + "]";
                if (!gap.is_array()) fail(path + " must be an array");
                std::vector<double> amps;
                for (std::size_t k = 0; k < gap.size(); ++k) {
                    amps.push_back(as_number(gap[k], path + "[" + std::to_string(k) + "]"));
                }
                ctl.amplitudes.push_back(std::move(amps));
            }
        }
        c.controls = std::move(ctl);
    }
    if (doc.contains("plan")) {
        const Json& j = require_object(doc["plan"], "plan");
        check_keys(j, "plan", {"directions", "observables"});
        if (j.contains("directions")) {
            if (!j["directions"].is_array()) fail("plan.directions must be an array");
            for (std::size_t i = 0; i < j["directions"].size(); ++i) {
                c.plan.directions.push_back(
                    as_triple(j["directions"][i], "plan.directions[" + std::to_string(i) + "]"));
            }
        }
        if (j.contains("observables")) {
            if (!j["observables"].is_array()) fail("plan.observables must be an array");
            for (std::size_t i = 0; i < j["observables"].size(); ++i) {
                c.plan.observables.push_back(
                    as_matrix(j["observables"][i], "plan.observables[" + std::to_string(i) + "]"));
            }
        }
    }
    if (c.mode == Mode::Evaluate && !doc.contains("n_measurements")) {
        c.n_measurements = static_cast<int>(std::max(c.plan.directions.size(), c.plan.observables.size()));
    }
    if (doc.contains("analytic")) {
        const Json& j = require_object(doc["analytic"], "analytic");
        check_keys(j, "analytic", {"construction", "plane_hint"});
        if (j.contains("construction")) {
            const Json& k = j["construction"];
            if (k == "optimal") {
                c.analytic.construction = AnalyticConstruction::Optimal;
            } else if (k == "equal-time") {
                c.analytic.construction = AnalyticConstruction::EqualTime;
            } else {
                fail("analytic.construction must be 'optimal' or 'equal-time'");
            }
        }
        if (j.contains("plane_hint")) c.analytic.plane_hint = as_triple(j["plane_hint"], "analytic.plane_hint");
    }
    if (doc.contains("optimizer")) {
        const Json& j = require_object(doc["optimizer"], "optimizer");
        check_keys(j, "optimizer", {"tolerance", "max_iters", "seed", "multi_starts", "grid_points"});
        auto& o = c.optimizer;
        if (j.contains("tolerance")) o.tolerance = as_number(j["tolerance"], "optimizer.tolerance");
        if (j.contains("max_iters")) o.max_iters = as_int(j["max_iters"], "optimizer.max_iters");
        if (j.contains("seed")) {
            const Json& s = j["seed"];
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
                fail("optimizer.seed must be a non-negative integer");
            }
            o.seed = s.get<std::uint64_t>();
        }
        if (j.contains("multi_starts")) o.multi_starts = as_int(j["multi_starts"], "optimizer.multi_starts");
        if (j.contains("grid_points")) o.grid_points = as_int(j["grid_points"], "optimizer.grid_points");
    }
    if (doc.contains("output")) {
        const Json& j = require_object(doc["output"], "output");
        check_keys(j, "output", {"trajectory_path", "summary_path"});
        for (auto [key, target] : {std::pair{"trajectory_path", &c.output.trajectory_path},
                                   std::pair{"summary_path", &c.output.summary_path}}) {
            if (!j.contains(key)) continue;
            if (!j[key].is_string()) fail(join_path("output", key) + " must be a string");
            *target = j[key].get<std::string>();
        }
    }

    validate(c);
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scenario file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_scenario(text.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string render_scenario(const ScenarioConfig& c) {
    OrderedJson doc = OrderedJson::object();
    doc["mode"] = std::string(to_string(c.mode));
    doc["dim"] = c.dim;
    doc["initial_state"] = operator_json(c.initial_state);
    doc["target"] = operator_json(c.target);
    doc["n_measurements"] = c.n_measurements;
    if (c.model) doc["model"] = {{"h0", matrix_json(c.model->h0.value)}, {"mu", matrix_json(c.model->mu.value)}};
    if (c.controls) {
        OrderedJson j = OrderedJson::object();
        j["segments_per_gap"] = c.controls->segments_per_gap;
        j["dt"] = c.controls->dt;
        j["u_max"] = c.controls->u_max;
        if (!c.controls->amplitudes.empty()) j["amplitudes"] = c.controls->amplitudes;
        doc["controls"] = j;
    }
    if (!c.plan.directions.empty() || !c.plan.observables.empty()) {
        OrderedJson j = OrderedJson::object();
        if (!c.plan.directions.empty()) {
            j["directions"] = OrderedJson::array();
            for (const auto& w : c.plan.directions) j["directions"].push_back(triple_json(w));
        }
        if (!c.plan.observables.empty()) {
            j["observables"] = OrderedJson::array();
            for (const auto& q : c.plan.observables) j["observables"].push_back(matrix_json(q.value));
        }
        doc["plan"] = j;
    }
    OrderedJson analytic = OrderedJson::object();
    analytic["construction"] = std::string(to_string(c.analytic.construction));
    if (c.analytic.plane_hint) analytic["plane_hint"] = triple_json(*c.analytic.plane_hint);
    doc["analytic"] = analytic;
    doc["optimizer"] = {{"tolerance", c.optimizer.tolerance},
                        {"max_iters", c.optimizer.max_iters},
                        {"seed", c.optimizer.seed},
                        {"multi_starts", c.optimizer.multi_starts},
                        {"grid_points", c.optimizer.grid_points}};
    doc["output"] = {{"trajectory_path", c.output.trajectory_path}, {"summary_path", c.output.summary_path}};
    return doc.dump(2) + "\n";
}

ObjectiveSpec build_objective(const ScenarioConfig& c) {
    DensityMatrix initial = std::holds_alternative<BlochVector>(c.initial_state)
                                ? bloch_to_rho(std::get<BlochVector>(c.initial_state))
                                : DensityMatrix(std::get<MatrixLiteral>(c.initial_state).value);
    HermitianOperator target(operator_matrix(c.target));
    std::optional<SystemModel> model;
    if (c.model) model.emplace(HermitianOperator(c.model->h0.value), HermitianOperator(c.model->mu.value));
    return ObjectiveSpec(std::move(initial), std::move(target), std::move(model));
}

OptimizerConfig build_optimizer_config(const ScenarioConfig& c) {
    OptimizerConfig config;
    config.tolerance = c.optimizer.tolerance;
    config.max_iters = c.optimizer.max_iters;
    config.seed = c.optimizer.seed;
    config.multi_starts = c.optimizer.multi_starts;
    config.grid_points = c.optimizer.grid_points;
    if (c.controls) {
        config.segment_duration = c.controls->dt;
        config.u_max = c.controls->u_max;
    }
    return config;
}

std::vector<TrajectoryRecord> record_trajectory(const ObjectiveSpec& spec, const MeasurementPlan& plan,
                                                std::span<const ControlSchedule> controls) {
    const auto states = propagate(spec, plan, controls);
    std::vector<BlochVector> directions;
    if (plan.is_qubit()) directions = plan.directions();

    std::vector<TrajectoryRecord> records;
    for (std::size_t i = 0; i < states.size(); ++i) {
        TrajectoryRecord r;
        r.step = static_cast<int>(i);
        if (spec.dim() == 2) r.bloch = rho_to_bloch(states[i]);
        r.purity = purity(states[i]);
        r.objective_so_far = expectation(states[i], spec.target());
        if (i > 0 && !directions.empty()) r.direction = directions[i - 1];
        records.push_back(r);
    }
    return records;
}

ScenarioOutcome run_scenario(const ScenarioConfig& c) {
    const auto started = std::chrono::steady_clock::now();
    ScenarioOutcome out;
    out.mode = c.mode;
    out.n = c.n_measurements;
    out.seed = c.optimizer.seed;
    try {
        const ObjectiveSpec spec = build_objective(c);
        const OptimizerConfig config = build_optimizer_config(c);
        std::vector<ControlSchedule> controls;

        switch (c.mode) {
            case Mode::AnalyticQubit: {
                const auto a0 = std::get<BlochVector>(c.initial_state);
                const auto wT = std::get<BlochVector>(c.target);
                const QubitPlan plan = c.analytic.construction == AnalyticConstruction::Optimal
                                           ? analytic_optimal_sequence(a0, wT, c.n_measurements, c.analytic.plane_hint)
                                           : equal_time_sequence(a0, wT, c.n_measurements, c.analytic.plane_hint);
                out.result.best_plan = MeasurementPlan::qubit_directions(plan.directions);
                out.result.best_value = plan.objective;
                out.result.converged = true;
                break;
            }
            case Mode::OptimizeMeasurements:
                out.result = optimize_measurements(spec, c.n_measurements, config);
                break;
            case Mode::OptimizeJoint: {
                const int segments = c.controls ? c.controls->segments_per_gap : 1;
                out.result = optimize_joint(spec, c.n_measurements, segments, config);
                controls = *out.result.best_controls;
                break;
            }
            case Mode::BruteForce:
                out.result = brute_force_grid(spec, c.n_measurements, c.optimizer.grid_points);
                break;
            case Mode::Evaluate: {
                if (!c.plan.observables.empty()) {
                    std::vector<HermitianOperator> observables;
                    for (const auto& q : c.plan.observables) observables.emplace_back(q.value);
                    out.result.best_plan = MeasurementPlan::general(std::move(observables));
                } else {
                    out.result.best_plan = MeasurementPlan::qubit_directions(c.plan.directions);
                }
                if (c.controls) {
                    for (const auto& amps : c.controls->amplitudes) controls.push_back({amps, c.controls->dt});
                }
                if (!controls.empty()) out.result.best_controls = controls;
                out.result.best_value = evaluate_objective(spec, out.result.best_plan, controls);
                out.result.evaluations = 1;
                out.result.converged = true;
                break;
            }
        }
        out.trajectory = record_trajectory(spec, out.result.best_plan, controls);
    } catch (const ValidationError& e) {
        rethrow_with_context(e, c.mode);
    } catch (const NumericalError& e) {
        rethrow_with_context(e, c.mode);
    } catch (const ResourceError& e) {
        rethrow_with_context(e, c.mode);
    }
    out.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

std::string format_trajectory(std::span<const TrajectoryRecord> records, bool bloch_columns) {
    std::string out = bloch_columns ? "step,bx,by,bz,purity,objective_so_far,wx,wy,wz\n"
                                    : "step,purity,objective_so_far\n";
    for (const auto& r : records) {
        out += std::to_string(r.step);
        if (bloch_columns) {
            const BlochVector b = r.bloch.value_or(BlochVector{});
            out += "," + format_real(b.x) + "," + format_real(b.y) + "," + format_real(b.z);
        }
        out += "," + format_real(r.purity) + "," + format_real(r.objective_so_far);
        if (bloch_columns) {
            if (r.direction) {
                out += "," + format_real(r.direction->x) + "," + format_real(r.direction->y) + "," +
                       format_real(r.direction->z);
            } else {
                out += ",,,";
            }
        }
        out += "\n";
    }
    return out;
}

std::string format_summary(const ScenarioOutcome& o) {
    OrderedJson doc = OrderedJson::object();
    doc["mode"] = std::string(to_string(o.mode));
    doc["n"] = o.n;
    doc["best_value"] = o.result.best_value;
    doc["evaluations"] = o.result.evaluations;
    doc["converged"] = o.result.converged;
    doc["seed"] = o.seed;
    doc["wall_time_s"] = o.wall_time_seconds;
    const auto& plan = o.result.best_plan;
    if (plan.is_qubit()) {
        doc["directions"] = OrderedJson::array();
        for (const auto& w : plan.directions()) doc["directions"].push_back(triple_json(w));
    } else {
        doc["observables"] = OrderedJson::array();
        for (const auto& q : plan.observables()) doc["observables"].push_back(matrix_json(q.matrix()));
    }
    if (o.result.best_controls) {
        doc["controls"] = OrderedJson::array();
        for (const auto& s : *o.result.best_controls) {
            doc["controls"].push_back({{"segment_duration", s.segment_duration}, {"amplitudes", s.amplitudes}});
        }
    }
    return doc.dump(2) + "\n";
}

void emit_trajectory(std::span<const TrajectoryRecord> records, bool bloch_columns,
                     const std::filesystem::path& path) {
    write_file(path, format_trajectory(records, bloch_columns), "trajectory file");
}

void emit_summary(const ScenarioOutcome& outcome, const std::filesystem::path& path) {
    write_file(path, format_summary(outcome), "summary file");
}

}  // namespace backaction
