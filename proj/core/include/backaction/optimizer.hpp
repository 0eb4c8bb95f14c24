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
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "backaction/bloch.hpp"
#include "backaction/quantum.hpp"

namespace backaction {

/// The measured observables Q_1..Q_N.
///
/// Two-level plans store one rank-one projector direction per measurement as
/// sphere angles. Higher-dimensional plans store the observables directly.
class MeasurementPlan {
   public:
    MeasurementPlan() = default;

    /// theta in [0, pi], phi in [0, 2pi).
    static MeasurementPlan qubit(std::vector<SphereAngles> angles);
    static MeasurementPlan qubit_directions(std::span<const BlochVector> directions);
    static MeasurementPlan general(std::vector<HermitianOperator> observables);

    bool is_qubit() const { return std::holds_alternative<std::vector<SphereAngles>>(data_); }
    std::size_t size() const;

    /// Requires is_qubit().
    const std::vector<SphereAngles>& angles() const;
    std::vector<BlochVector> directions() const;

    /// Observables as Hermitian operators; qubit directions become projectors.
    std::vector<HermitianOperator> observables() const;
    /// Eigenspaces of every observable, in measurement order.
    std::vector<SpectralDecomposition> decompositions() const;

   private:
    std::variant<std::vector<SphereAngles>, std::vector<HermitianOperator>> data_;
};

/// Piecewise-constant control amplitude over one inter-measurement gap.
struct ControlSchedule {
    std::vector<double> amplitudes;
    double segment_duration = 1.0;

    std::size_t segment_count() const { return amplitudes.size(); }
};

/// Initial state, target operator O, and (for coherent control) the system model.
class ObjectiveSpec {
   public:
    ObjectiveSpec(DensityMatrix initial_state, HermitianOperator target,
                  std::optional<SystemModel> model = std::nullopt);

    const DensityMatrix& initial_state() const { return initial_state_; }
    const HermitianOperator& target() const { return target_; }
    const std::optional<SystemModel>& model() const { return model_; }
    Eigen::Index dim() const { return initial_state_.dim(); }

   private:
    DensityMatrix initial_state_;
    HermitianOperator target_;
    std::optional<SystemModel> model_;
};

struct OptimizerConfig {
    double tolerance = 1e-9;
    int max_iters = 10000;
    std::uint64_t seed = 0;
    int multi_starts = 8;
    int grid_points = 32;
    /// Coarse samples per coordinate before golden-section refinement.
    int scan_points = 16;
    int control_scan_points = 64;
    /// Absolute bracket width at which golden-section stops.
    double line_tolerance = 1e-9;
    /// Box bound |u| <= u_max on control amplitudes.
    double u_max = 10.0;
    double segment_duration = 1.0;
};

struct TracePoint {
    int iteration = 0;
    double value = 0.0;
};

struct OptimizationResult {
    MeasurementPlan best_plan;
    std::optional<std::vector<ControlSchedule>> best_controls;
    double best_value = 0.0;
    std::int64_t evaluations = 0;
    bool converged = false;
    std::vector<TracePoint> trace;
};

/// States along the pipeline U_N o M_N o ... o M_1 o U_0 (rho).
///
/// Element 0 is the state after U_0; element i the state after M_i and U_i.
/// With no controls every U_i is the identity. `controls`, when non-empty,
/// must hold N + 1 schedules and `spec` must carry a model.
std::vector<DensityMatrix> propagate(const ObjectiveSpec& spec, const MeasurementPlan& plan,
                                     std::span<const ControlSchedule> controls = {});

/// Tr[rho_final O].
double evaluate_objective(const ObjectiveSpec& spec, const MeasurementPlan& plan,
                          std::span<const ControlSchedule> controls = {});

/// Maximises the objective over n measured observables by multi-start
/// coordinate ascent (coarse scan plus golden-section per coordinate).
///
/// Two-level specs search projector directions. Higher dimensions search
/// observables V D V^dagger with D = diag(0, 1, ..., d-1) and V a product of
/// complex Givens rotations; this path is experimental.
OptimizationResult optimize_measurements(const ObjectiveSpec& spec, int n, const OptimizerConfig& config = {});

/// Alternates direction sweeps and control-amplitude sweeps. Each of the
/// n + 1 gaps carries `segments_per_gap` segments of config.segment_duration.
/// The trace records one value per outer iteration and never decreases.
OptimizationResult optimize_joint(const ObjectiveSpec& spec, int n, int segments_per_gap,
                                  const OptimizerConfig& config = {});

struct GridShape {
    int theta_points = 32;
    int phi_points = 32;
};

inline constexpr std::int64_t kDefaultGridEvaluationCap = 100'000'000;

/// Exhaustive search over a (theta, phi) product grid per measurement, two-level specs only.
///
/// theta_k = k pi / (T - 1) for k < T and phi_j = 2 pi j / P for j < P. Ties go
/// to the lexicographically smallest (theta_1, phi_1, ...). Throws
/// ResourceError when (T P)^n exceeds `evaluation_cap`.
OptimizationResult brute_force_grid(const ObjectiveSpec& spec, int n, GridShape shape,
                                    std::int64_t evaluation_cap = kDefaultGridEvaluationCap);
OptimizationResult brute_force_grid(const ObjectiveSpec& spec, int n, int grid_points,
                                    std::int64_t evaluation_cap = kDefaultGridEvaluationCap);

/// Lipschitz bound on the gap between the objective optimum and a grid maximum
/// for a two-level target (I + w.sigma)/2: n times the grid's covering radius.
double grid_resolution_bound(int n, GridShape shape);

}  // namespace backaction
