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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Tolerances and time budgets are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "backaction/bloch.hpp"
#include "backaction/optimizer.hpp"
#include "backaction/quantum.hpp"
#include "backaction/scenario.hpp"
#include "test_support.hpp"

namespace {

using namespace backaction;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool ok = true;
    std::string detail;
};

void fail(Verdict& v, const std::string& why) {
    if (v.ok) v.detail = why;
    v.ok = false;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, format, a, b, c);
    return buffer;
}

ObjectiveSpec qubit_spec(const BlochVector& a0, const BlochVector& wt) {
    return ObjectiveSpec(bloch_to_rho(a0), projector_from_direction(wt));
}

// 1. Channel properties, 1000 random (rho, Q) pairs per dimension, tolerance 1e-10.
Verdict channel_properties() {
    constexpr double kTol = 1e-10;
    Verdict v;
    std::mt19937_64 rng(1001);
    for (Eigen::Index dim : {2, 3, 4, 6}) {
        for (int trial = 0; trial < 1000; ++trial) {
            const auto rho = backaction::testing::random_density(dim, rng, trial % 5 == 0 ? 1 : -1);
            const auto q = backaction::testing::random_hermitian(dim, rng, trial % 4 == 0);
            const auto once = apply_measurement(rho, q);
            const auto twice = apply_measurement(once, q);
            const ComplexMatrix& m = once.matrix();
            const double trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
            const double min_eig = hermitian_eigenvalues(m).minCoeff();
            const double herm = hermiticity_violation(m);
            const double idem = backaction::testing::max_abs_diff(twice.matrix(), m);
            const double purity_gain = purity(once) - purity(rho);
            if (trace_error > kTol) fail(v, fmt("trace error %.3g (dim %.0f)", trace_error, double(dim)));
            if (min_eig < -kTol) fail(v, fmt("negative eigenvalue %.3g (dim %.0f)", min_eig, double(dim)));
            if (herm > kTol) fail(v, fmt("hermiticity violation %.3g (dim %.0f)", herm, double(dim)));
            if (idem > kTol) fail(v, fmt("idempotence error %.3g (dim %.0f)", idem, double(dim)));
            if (purity_gain > kTol) fail(v, fmt("purity increased by %.3g (dim %.0f)", purity_gain, double(dim)));
        }
    }
    if (v.ok) v.detail = "4000 pairs, dims {2,3,4,6}";
    return v;
}

// 2. Bloch map vs full matrix channel, 1000 random (b, w), tolerance 1e-10.
Verdict bloch_equivalence() {
    constexpr double kTol = 1e-10;
    Verdict v;
    std::mt19937_64 rng(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto b = backaction::testing::random_in_ball(rng);
        const auto w = backaction::testing::random_unit(rng);
        const auto via_matrix = rho_to_bloch(apply_measurement(bloch_to_rho(b), projector_from_direction(w)));
        worst = std::max(worst, (via_matrix - measure_bloch(b, w)).norm());
    }
    if (worst > kTol) fail(v, fmt("max deviation %.3g", worst));
    if (v.ok) v.detail = fmt("max deviation %.3g", worst);
    return v;
}

// 3. Analytic-qubit mode, a0 = +z, wT = -z, N = 10: directions along b_i within 1e-9,
// |b_i| = cos^i(18 deg) strictly decreasing and < 1, objective (1 + cos^10(18 deg)) / 2
// (0.802714 to six digits) +- 1e-9.
Verdict analytic_flip(const AnalyticConstruction construction) {
    constexpr double kDirTol = 1e-9;
    constexpr double kNormTol = 1e-9;
    constexpr double kObjectiveTol = 1e-9;
    Verdict v;
    ScenarioConfig config;
    config.mode = Mode::AnalyticQubit;
    config.initial_state = BlochVector{0.0, 0.0, 1.0};
    config.target = BlochVector{0.0, 0.0, -1.0};
    config.n_measurements = 10;
    config.analytic.construction = construction;
    const auto outcome = run_scenario(config);
    const auto directions = outcome.result.best_plan.directions();
    if (directions.size() != 10 || outcome.trajectory.size() != 11) {
        fail(v, "wrong plan length");
        return v;
    }
    const double step = kPi / 10.0;
    double previous = 1.0;
    for (int i = 1; i <= 10; ++i) {
        const auto& b = *outcome.trajectory[i].bloch;
        const auto& w = directions[i - 1];
        if (std::abs(w.norm() - 1.0) > kDirTol) fail(v, fmt("direction %.0f not unit", i));
        if ((w - b.normalized()).norm() > kDirTol) fail(v, fmt("w_%.0f differs from b/|b| by %.3g", i, (w - b.normalized()).norm()));
        const double expected = std::pow(std::cos(step), i);
        if (std::abs(b.norm() - expected) > kNormTol) {
            fail(v, fmt("|b_%.0f| = %.9f, expected cos^i(18 deg) = %.9f", i, b.norm(), expected));
        }
        if (!(b.norm() < previous)) fail(v, fmt("|b_%.0f| not strictly decreasing", i));
        if (!(b.norm() < 1.0)) fail(v, fmt("state %.0f is pure", i));
        previous = b.norm();
    }
    const double objective = 0.5 * (1.0 + std::pow(std::cos(step), 10));
    if (std::abs(outcome.result.best_value - objective) > kObjectiveTol) {
        fail(v, fmt("objective %.9f, expected %.9f", outcome.result.best_value, objective));
    }
    if (v.ok) v.detail = fmt("objective %.9f", outcome.result.best_value);
    return v;
}

// 4. Optimizer vs (1 + cos^n(Theta/n)) / 2, n = 2..12, 20 random endpoint pairs, tolerance 1e-4.
Verdict optimizer_vs_analytic() {
    constexpr double kTol = 1e-4;
    Verdict v;
    std::mt19937_64 rng(1004);
    double worst_stated = 0.0;
    double worst_optimal = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
        const auto a0 = backaction::testing::random_unit(rng);
        const auto wt = backaction::testing::random_unit(rng);
        const double theta = angle_between(a0, wt);
        for (int n = 2; n <= 12; ++n) {
            const double found = optimize_measurements(qubit_spec(a0, wt), n).best_value;
            worst_stated = std::max(worst_stated, std::abs(found - equal_time_objective(theta, n)));
            worst_optimal = std::max(worst_optimal, std::abs(found - optimal_objective(theta, n)));
        }
    }
    v.detail = fmt("max |best - (1+cos^n(T/n))/2| = %.3g; max |best - (1+cos^(n+1)(T/(n+1)))/2| = %.3g",
                   worst_stated, worst_optimal);
    v.ok = worst_stated <= kTol;
    return v;
}

// 5. Grid oracle, n in {1, 2}, 10 random pairs, 32 x 32 grid per direction:
// optimizer >= grid max - 1e-6 and analytic >= grid max - grid_resolution_bound.
Verdict brute_force_oracle() {
    constexpr double kOptimizerSlack = 1e-6;
    Verdict v;
    const GridShape shape{32, 32};
    std::mt19937_64 rng(1005);
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int pair = 0; pair < 10; ++pair) {
        const auto a0 = backaction::testing::random_unit(rng);
        const auto wt = backaction::testing::random_unit(rng);
        const auto spec = qubit_spec(a0, wt);
        for (int n : {1, 2}) {
            const double grid = brute_force_grid(spec, n, shape).best_value;
            const double optimized = optimize_measurements(spec, n).best_value;
            const double analytic = analytic_optimal_sequence(a0, wt, n).objective;
            worst_margin = std::min(worst_margin, optimized - grid);
            if (optimized < grid - kOptimizerSlack) {
                fail(v, fmt("optimizer %.9f below grid max %.9f (n=%.0f)", optimized, grid, n));
            }
            if (analytic < grid - grid_resolution_bound(n, shape)) {
                fail(v, fmt("analytic %.9f below grid max %.9f (n=%.0f)", analytic, grid, n));
            }
        }
    }
    if (v.ok) v.detail = fmt("min (optimizer - grid max) = %.3g", worst_margin);
    return v;
}

// 6. 1 - J*_n at n = 1000, Theta = pi, vs pi^2 / (4n), 5% relative.
Verdict anti_zeno_limit() {
    constexpr double kRelTol = 0.05;
    constexpr int n = 1000;
    Verdict v;
    const BlochVector a0{0.0, 0.0, 1.0};
    const BlochVector wt{0.0, 0.0, -1.0};
    const auto plan = analytic_optimal_sequence(a0, wt, n);
    const double deficit = 1.0 - qubit_objective(a0, wt, plan.directions);
    const double predicted = kPi * kPi / (4.0 * n);
    const double rel = std::abs(deficit - predicted) / predicted;
    if (rel > kRelTol) fail(v, fmt("1 - J = %.6g vs %.6g", deficit, predicted));
    v.detail = fmt("1 - J = %.6g, pi^2/(4n) = %.6g, rel %.3g", deficit, predicted, rel);
    return v;
}

// 7. Rabi scenario: optimize_joint reaches >= 1 - 1e-6.
Verdict rabi_control() {
    constexpr double kTol = 1e-6;
    Verdict v;
    const auto outcome = run_scenario(load_scenario(BACKACTION_SCENARIO_DIR "/rabi_joint.json"));
    if (outcome.result.best_value < 1.0 - kTol) fail(v, fmt("best_value %.12f", outcome.result.best_value));
    if (v.ok) v.detail = fmt("best_value %.12f", outcome.result.best_value);
    return v;
}

// 8. Two seed-0 runs of the flip optimize-measurements scenario give identical trajectories.
Verdict determinism() {
    Verdict v;
    auto config = load_scenario(BACKACTION_SCENARIO_DIR "/flip_optimize.json");
    config.optimizer.seed = 0;
    const auto first = format_trajectory(run_scenario(config).trajectory, true);
    const auto second = format_trajectory(run_scenario(config).trajectory, true);
    if (first != second) fail(v, "trajectory files differ");
    if (v.ok) v.detail = fmt("%.0f bytes identical", double(first.size()));
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Verdict()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "channel property suite", 10.0, channel_properties},
        {2, "Bloch equivalence", 1.0, bloch_equivalence},
        {3, "analytic-qubit flip, N=10", 1.0, [] { return analytic_flip(AnalyticConstruction::Optimal); }},
        {4, "optimizer vs closed form", 60.0, optimizer_vs_analytic},
        {5, "brute-force grid oracle", 120.0, brute_force_oracle},
        {6, "anti-Zeno limit", 1.0, anti_zeno_limit},
        {7, "coherent control, Rabi", 10.0, rabi_control},
        {8, "determinism", 30.0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Verdict verdict;
        try {
            verdict = c.check();
        } catch (const std::exception& e) {
            fail(verdict, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (seconds > c.budget_seconds) fail(verdict, fmt("took %.2f s, budget %.0f s", seconds, c.budget_seconds));
        if (!verdict.ok) ++failures;
        std::printf("[%s] %d %s (%.2f s): %s\n", verdict.ok ? "PASS" : "FAIL", c.id, c.name, seconds,
                    verdict.detail.c_str());
        std::fflush(stdout);
    }

    // Informational: the equal-time construction carries the values criterion 3 states.
    const auto equal_time = analytic_flip(AnalyticConstruction::EqualTime);
    std::printf("[info] criterion 3 with analytic.construction=equal-time: %s (%s)\n",
                equal_time.ok ? "meets stated values" : "does not meet stated values", equal_time.detail.c_str());

    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
