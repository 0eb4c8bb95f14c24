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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "backaction/bloch.hpp"
#include "backaction/optimizer.hpp"
#include "backaction/quantum.hpp"

namespace backaction {

enum class Mode { AnalyticQubit, OptimizeMeasurements, OptimizeJoint, BruteForce, Evaluate };

std::string_view to_string(Mode mode);
/// Throws ValidationError for unknown names.
Mode mode_from_string(std::string_view name);

enum class AnalyticConstruction { Optimal, EqualTime };

std::string_view to_string(AnalyticConstruction c);

/// A complex matrix as written in a scenario file. Equality is exact and
/// shape-aware.
struct MatrixLiteral {
    ComplexMatrix value;
    friend bool operator==(const MatrixLiteral& a, const MatrixLiteral& b);
};

/// Either a Bloch triple or a full matrix.
using OperatorInput = std::variant<BlochVector, MatrixLiteral>;

struct ModelInput {
    MatrixLiteral h0;
    MatrixLiteral mu;
    friend bool operator==(const ModelInput&, const ModelInput&) = default;
};

struct ControlsInput {
    int segments_per_gap = 1;
    double dt = 1.0;
    double u_max = 10.0;
    /// Fixed amplitudes per gap; only read in evaluate mode.
    std::vector<std::vector<double>> amplitudes;
    friend bool operator==(const ControlsInput&, const ControlsInput&) = default;
};

struct PlanInput {
    std::vector<BlochVector> directions;
    std::vector<MatrixLiteral> observables;
    friend bool operator==(const PlanInput&, const PlanInput&) = default;
};

struct AnalyticInput {
    AnalyticConstruction construction = AnalyticConstruction::Optimal;
    std::optional<BlochVector> plane_hint;
    friend bool operator==(const AnalyticInput&, const AnalyticInput&) = default;
};

struct OptimizerSettings {
    double tolerance = 1e-9;
    int max_iters = 10000;
    std::uint64_t seed = 0;
    int multi_starts = 8;
    int grid_points = 32;
    friend bool operator==(const OptimizerSettings&, const OptimizerSettings&) = default;
};

struct OutputPaths {
    std::string trajectory_path = "trajectory.csv";
    std::string summary_path = "summary.json";
    friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct ScenarioConfig {
    Mode mode = Mode::Evaluate;
    int dim = 2;
    OperatorInput initial_state;
    OperatorInput target;
    int n_measurements = 0;
    std::optional<ModelInput> model;
    std::optional<ControlsInput> controls;
    PlanInput plan;
    AnalyticInput analytic;
    OptimizerSettings optimizer;
    OutputPaths output;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates a JSON scenario document, filling defaults.
/// All failures are ValidationError with the offending field named.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical JSON for a config; parse_scenario(render_scenario(c)) == c.
std::string render_scenario(const ScenarioConfig& config);

ObjectiveSpec build_objective(const ScenarioConfig& config);
OptimizerConfig build_optimizer_config(const ScenarioConfig& config);

struct TrajectoryRecord {
    int step = 0;
    std::optional<BlochVector> bloch;  // two-level runs only
    double purity = 0.0;
    double objective_so_far = 0.0;
    std::optional<BlochVector> direction;  // absent at step 0 and for non-direction plans
};

struct ScenarioOutcome {
    Mode mode = Mode::Evaluate;
    int n = 0;
    std::uint64_t seed = 0;
    OptimizationResult result;
    std::vector<TrajectoryRecord> trajectory;
    double wall_time_seconds = 0.0;
};

/// Runs the configured mode and records the state after U_0 and after each
/// measurement/evolution pair. Lower-level errors are rethrown with the mode
/// prepended to the message.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

/// States along the pipeline as trajectory records.
std::vector<TrajectoryRecord> record_trajectory(const ObjectiveSpec& spec, const MeasurementPlan& plan,
                                                std::span<const ControlSchedule> controls = {});

/// Comma-separated, header first, reals with 12 significant digits.
std::string format_trajectory(std::span<const TrajectoryRecord> records, bool bloch_columns);
std::string format_summary(const ScenarioOutcome& outcome);

void emit_trajectory(std::span<const TrajectoryRecord> records, bool bloch_columns,
                     const std::filesystem::path& path);
void emit_summary(const ScenarioOutcome& outcome, const std::filesystem::path& path);

}  // namespace backaction
