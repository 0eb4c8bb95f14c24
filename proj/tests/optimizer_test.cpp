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

#include "backaction/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "backaction/errors.hpp"
#include "gtest/gtest.h"
#include "test_support.hpp"

using namespace backaction;

namespace {

constexpr double kPi = std::numbers::pi;
const BlochVector kPlusZ{0.0, 0.0, 1.0};
const BlochVector kMinusZ{0.0, 0.0, -1.0};

ObjectiveSpec qubit_spec(const BlochVector& a0, const BlochVector& wt) {
    return ObjectiveSpec(bloch_to_rho(a0), projector_from_direction(wt));
}

SystemModel rabi_model(const ComplexMatrix& h0) {
    return SystemModel(HermitianOperator(h0), HermitianOperator(pauli_x()));
}

}  // namespace

TEST(MeasurementPlan, validates_angle_ranges) {
    EXPECT_THROW(MeasurementPlan::qubit({{-0.1, 0.0}}), ValidationError);
    EXPECT_THROW(MeasurementPlan::qubit({{kPi + 1e-9, 0.0}}), ValidationError);
    EXPECT_THROW(MeasurementPlan::qubit({{0.5, 2.0 * kPi}}), ValidationError);
    const auto plan = MeasurementPlan::qubit({{kPi / 2.0, 0.0}, {kPi, 0.0}});
    EXPECT_TRUE(plan.is_qubit());
    EXPECT_EQ(plan.size(), 2u);
    EXPECT_EQ(plan.observables().size(), 2u);
}

TEST(EvaluateObjective, empty_plan_is_initial_overlap) {
    std::mt19937_64 rng(31);
    const auto a0 = backaction::testing::random_unit(rng);
    const auto wt = backaction::testing::random_unit(rng);
    EXPECT_NEAR(evaluate_objective(qubit_spec(a0, wt), MeasurementPlan::qubit({})), 0.5 * (1.0 + a0.dot(wt)), 1e-14);
}

TEST(EvaluateObjective, equal_time_flip_plan) {
    const auto plan = equal_time_sequence(kPlusZ, kMinusZ, 10);
    const double value =
        evaluate_objective(qubit_spec(kPlusZ, kMinusZ), MeasurementPlan::qubit_directions(plan.directions));
    EXPECT_NEAR(value, 0.802714524856553, 1e-12);
}

TEST(EvaluateObjective, matches_bloch_recursion_for_random_plans) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a0 = backaction::testing::random_unit(rng);
        const auto wt = backaction::testing::random_unit(rng);
        std::vector<BlochVector> directions;
        for (int i = 0; i < 1 + trial % 6; ++i) directions.push_back(backaction::testing::random_unit(rng));
        const double direct = qubit_objective(a0, wt, directions);
        const double via_plan =
            evaluate_objective(qubit_spec(a0, wt), MeasurementPlan::qubit_directions(directions));
        EXPECT_NEAR(via_plan, direct, 1e-12);
    }
}

TEST(EvaluateObjective, rabi_pulse_reaches_target) {
    const ObjectiveSpec spec(DensityMatrix::basis_state(2, 0), HermitianOperator(DensityMatrix::basis_state(2, 1).matrix()),
                             rabi_model(ComplexMatrix::Zero(2, 2)));
    const std::vector<ControlSchedule> controls{{{kPi / 2.0}, 1.0}};
    EXPECT_NEAR(evaluate_objective(spec, MeasurementPlan::qubit({}), controls), 1.0, 1e-12);
    const std::vector<ControlSchedule> half{{{kPi / 4.0}, 1.0}};
    EXPECT_NEAR(evaluate_objective(spec, MeasurementPlan::qubit({}), half), 0.5, 1e-12);
}

TEST(EvaluateObjective, rejects_wrong_schedule_count) {
    const ObjectiveSpec spec(DensityMatrix::basis_state(2, 0), HermitianOperator(pauli_z()),
                             rabi_model(ComplexMatrix::Zero(2, 2)));
    const std::vector<ControlSchedule> controls{{{1.0}, 1.0}};
    EXPECT_THROW(evaluate_objective(spec, MeasurementPlan::qubit({{1.0, 0.0}}), controls), ValidationError);
    EXPECT_THROW(evaluate_objective(qubit_spec(kPlusZ, kMinusZ), MeasurementPlan::qubit({}), controls),
                 ValidationError);
}

TEST(OptimizeMeasurements, flip_with_ten_measurements_reaches_optimum) {
    const auto result = optimize_measurements(qubit_spec(kPlusZ, kMinusZ), 10);
    EXPECT_GE(result.best_value, 0.817270571167328 - 1e-6);
    EXPECT_LE(result.best_value, 0.817270571167328 + 1e-12);
    EXPECT_EQ(result.best_plan.size(), 10u);
    EXPECT_GT(result.evaluations, 0);
    EXPECT_NEAR(evaluate_objective(qubit_spec(kPlusZ, kMinusZ), result.best_plan), result.best_value, 1e-15);
}

TEST(OptimizeMeasurements, aligned_endpoints_reach_certainty) {
    const BlochVector w{0.0, 1.0, 0.0};
    EXPECT_NEAR(optimize_measurements(qubit_spec(w, w), 3).best_value, 1.0, 1e-9);
}

TEST(OptimizeMeasurements, two_measurements_half_turn) {
    EXPECT_NEAR(optimize_measurements(qubit_spec(kPlusZ, kMinusZ), 2).best_value, 0.5625, 1e-7);
}

TEST(OptimizeMeasurements, agrees_with_closed_form_optimum) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 12; ++trial) {
        const auto a0 = backaction::testing::random_unit(rng);
        const auto wt = backaction::testing::random_unit(rng);
        const int n = 1 + trial % 6;
        const double expected = optimal_objective(angle_between(a0, wt), n);
        const double found = optimize_measurements(qubit_spec(a0, wt), n).best_value;
        EXPECT_NEAR(found, expected, 1e-6) << "trial " << trial;
    }
}

TEST(OptimizeMeasurements, not_beaten_by_grid_search) {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 4; ++trial) {
        const auto spec = qubit_spec(backaction::testing::random_unit(rng), backaction::testing::random_unit(rng));
        const int n = 1 + trial % 2;
        const auto grid = brute_force_grid(spec, n, 16);
        EXPECT_GE(optimize_measurements(spec, n).best_value, grid.best_value - 1e-9);
    }
}

TEST(OptimizeMeasurements, deterministic_for_a_seed) {
    OptimizerConfig config;
    config.seed = 42;
    const auto spec = qubit_spec(kPlusZ, BlochVector{1.0, 0.0, 0.0});
    const auto a = optimize_measurements(spec, 4, config);
    const auto b = optimize_measurements(spec, 4, config);
    EXPECT_EQ(a.best_value, b.best_value);
    EXPECT_EQ(a.best_plan.angles(), b.best_plan.angles());
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(OptimizeMeasurements, trace_never_decreases) {
    OptimizerConfig config;
    config.multi_starts = 1;
    const auto result = optimize_measurements(qubit_spec(kPlusZ, kMinusZ), 6, config);
    ASSERT_GE(result.trace.size(), 2u);
    for (std::size_t i = 1; i < result.trace.size(); ++i) EXPECT_GE(result.trace[i].value, result.trace[i - 1].value);
}

TEST(OptimizeMeasurements, rejects_bad_arguments) {
    EXPECT_THROW(optimize_measurements(qubit_spec(kPlusZ, kMinusZ), 0), ValidationError);
    OptimizerConfig config;
    config.multi_starts = 0;
    EXPECT_THROW(optimize_measurements(qubit_spec(kPlusZ, kMinusZ), 2, config), ValidationError);
}

TEST(OptimizeMeasurements, qutrit_beats_embedded_qubit_plan) {
    // |0> -> |1> in a three-level system; the best qubit plan embedded in the
    // {|0>, |1>} block gives 0.5625 for two measurements.
    const ObjectiveSpec spec(DensityMatrix::basis_state(3, 0), HermitianOperator(DensityMatrix::basis_state(3, 1).matrix()));
    OptimizerConfig config;
    config.multi_starts = 4;
    const auto result = optimize_measurements(spec, 2, config);
    EXPECT_GE(result.best_value, 0.5625 - 1e-6);
    EXPECT_LE(result.best_value, 1.0 + 1e-12);
    EXPECT_FALSE(result.best_plan.is_qubit());
}

TEST(OptimizeJoint, rabi_flip_without_measurements) {
    const ObjectiveSpec spec(DensityMatrix::basis_state(2, 0), HermitianOperator(DensityMatrix::basis_state(2, 1).matrix()),
                             rabi_model(ComplexMatrix::Zero(2, 2)));
    const auto result = optimize_joint(spec, 0, 1);
    EXPECT_GE(result.best_value, 1.0 - 1e-6);
    ASSERT_TRUE(result.best_controls.has_value());
    ASSERT_EQ(result.best_controls->size(), 1u);
    EXPECT_LE(std::abs(result.best_controls->front().amplitudes.front()), 10.0);
}

TEST(OptimizeJoint, zero_hamiltonian_without_drive_matches_measurement_only) {
    // mu = 0 makes every control inert, so only the measurements matter.
    const ObjectiveSpec spec(bloch_to_rho(kPlusZ), projector_from_direction(kMinusZ),
                             SystemModel(HermitianOperator(ComplexMatrix::Zero(2, 2)),
                                         HermitianOperator(ComplexMatrix::Zero(2, 2))));
    const double joint = optimize_joint(spec, 3, 1).best_value;
    const double measurement_only = optimize_measurements(qubit_spec(kPlusZ, kMinusZ), 3).best_value;
    EXPECT_NEAR(joint, measurement_only, 1e-8);
}

TEST(OptimizeJoint, controls_never_hurt) {
    const ObjectiveSpec spec(bloch_to_rho(kPlusZ), projector_from_direction(kMinusZ),
                             SystemModel(HermitianOperator(0.3 * pauli_z()), HermitianOperator(pauli_y())));
    const auto result = optimize_joint(spec, 2, 1);
    EXPECT_GE(result.best_value, 0.5625 - 1e-9);
    for (std::size_t i = 1; i < result.trace.size(); ++i) EXPECT_GE(result.trace[i].value, result.trace[i - 1].value);
}

TEST(OptimizeJoint, requires_a_model) {
    EXPECT_THROW(optimize_joint(qubit_spec(kPlusZ, kMinusZ), 1, 1), ValidationError);
}

TEST(BruteForceGrid, single_measurement_half_turn) {
    const auto result = brute_force_grid(qubit_spec(kPlusZ, kMinusZ), 1, GridShape{180, 36});
    EXPECT_LE(result.best_value, 0.5 + 1e-12);
    EXPECT_GE(result.best_value, 0.5 - grid_resolution_bound(1, GridShape{180, 36}));
    EXPECT_EQ(result.evaluations, 180 * 36);
}

TEST(BruteForceGrid, finds_exact_grid_optimum) {
    // theta = pi/2 is on a 17-point theta grid, so the quarter-turn optimum is attained exactly.
    const auto result = brute_force_grid(qubit_spec(kPlusZ, kMinusZ), 1, GridShape{17, 8});
    EXPECT_NEAR(result.best_value, 0.5, 1e-14);
    ASSERT_EQ(result.best_plan.angles().size(), 1u);
    EXPECT_NEAR(result.best_plan.angles()[0].theta, kPi / 2.0, 1e-15);
    EXPECT_EQ(result.best_plan.angles()[0].phi, 0.0);
}

TEST(BruteForceGrid, resource_guard) {
    EXPECT_THROW(brute_force_grid(qubit_spec(kPlusZ, kMinusZ), 6, 32), ResourceError);
    EXPECT_THROW(brute_force_grid(qubit_spec(kPlusZ, kMinusZ), 2, 16, 1000), ResourceError);
    EXPECT_THROW(brute_force_grid(qubit_spec(kPlusZ, kMinusZ), 1, 4), ValidationError);
}

TEST(GridResolutionBound, scales_with_n_and_spacing) {
    const GridShape shape{33, 32};
    EXPECT_NEAR(grid_resolution_bound(1, shape), 0.5 * (kPi / 32.0 + 2.0 * kPi / 32.0), 1e-15);
    EXPECT_NEAR(grid_resolution_bound(3, shape), 3.0 * grid_resolution_bound(1, shape), 1e-15);
}
