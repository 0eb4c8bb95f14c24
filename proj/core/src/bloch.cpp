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

#include "backaction/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "backaction/errors.hpp"

namespace backaction {
namespace {

constexpr double kAntipodalSine = 1e-9;

// Unit vector orthogonal to a0 spanning, with a0, the great circle toward wT.
BlochVector circle_tangent(const BlochVector& a0, const BlochVector& wT, std::optional<BlochVector> plane_hint) {
    const BlochVector off_axis = wT - a0.dot(wT) * a0;
    if (off_axis.norm() > kAntipodalSine) return off_axis.normalized();

    auto orthogonal_part = [&](const BlochVector& h) { return h - a0.dot(h) * a0; };
    if (plane_hint) {
        const BlochVector t = orthogonal_part(*plane_hint);
        if (t.norm() <= kAntipodalSine) throw ValidationError("plane_hint is parallel to the initial direction");
        return t.normalized();
    }
    BlochVector t = orthogonal_part({1.0, 0.0, 0.0});
    if (t.norm() <= kAntipodalSine) t = orthogonal_part({0.0, 1.0, 0.0});
    return t.normalized();
}

void require_positive_count(int n) {
    if (n <= 0) throw ValidationError("number of measurements must be positive");
}

// Directions at angles i * step (i = 1..n) on the circle through a0 and tangent.
QubitPlan geodesic_plan(const BlochVector& a0, const BlochVector& tangent, double step, int n) {
    QubitPlan plan;
    plan.directions.reserve(n);
    plan.predicted_states.reserve(n);
    const double shrink = std::cos(step);
    double length = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double angle = i * step;
        const BlochVector w = std::cos(angle) * a0 + std::sin(angle) * tangent;
        length *= shrink;
        plan.directions.push_back(w);
        plan.predicted_states.push_back(length * w);
    }
    return plan;
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(dot(*this)); }

BlochVector BlochVector::normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
}

BlochVector direction_from_angles(SphereAngles a) {
    const double s = std::sin(a.theta);
    return {s * std::cos(a.phi), s * std::sin(a.phi), std::cos(a.theta)};
}

SphereAngles angles_from_direction(const BlochVector& w) {
    const double r = w.norm();
    const double theta = std::acos(std::clamp(w.z / r, -1.0, 1.0));
    double phi = (w.x == 0.0 && w.y == 0.0) ? 0.0 : std::atan2(w.y, w.x);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
    return {theta, phi};
}

double angle_between(const BlochVector& a, const BlochVector& b) {
    return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

void require_unit(const BlochVector& w, const char* what) {
    const double n = w.norm();
    if (!(std::abs(n - 1.0) <= kUnitNormTolerance)) {
        std::ostringstream os;
        os << what << " must have unit norm, got " << n;
        throw ValidationError(os.str());
    }
}

HermitianOperator bloch_operator(const BlochVector& b) {
    ComplexMatrix m(2, 2);
    m << 1.0 + b.z, Complex(b.x, -b.y), Complex(b.x, b.y), 1.0 - b.z;
    return HermitianOperator::assume_valid(0.5 * m);
}

DensityMatrix bloch_to_rho(const BlochVector& b) {
    const double n = b.norm();
    if (!(n <= 1.0 + kUnitNormTolerance)) {
        std::ostringstream os;
        os << "Bloch vector lies outside the unit ball: |b| = " << n;
        throw ValidationError(os.str());
    }
    return DensityMatrix::assume_valid(bloch_operator(b).matrix());
}

BlochVector rho_to_bloch(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw ValidationError("Bloch coordinates need a two-level state");
    const ComplexMatrix& m = rho.matrix();
    // Tr[rho sigma_k] written out for the 2x2 case.
    return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

HermitianOperator projector_from_direction(const BlochVector& w) {
    require_unit(w, "measurement direction");
    return bloch_operator(w);
}

SpectralDecomposition measurement_from_direction(const BlochVector& w) {
    require_unit(w, "measurement direction");
    return {{1.0, 0.0}, {bloch_operator(w).matrix(), bloch_operator(-w).matrix()}};
}

BlochVector measure_bloch(const BlochVector& b, const BlochVector& w) {
    require_unit(w, "measurement direction");
    return b.dot(w) * w;
}

QubitPlan analytic_optimal_sequence(const BlochVector& a0, const BlochVector& wT, int n,
                                    std::optional<BlochVector> plane_hint) {
    require_positive_count(n);
    require_unit(a0, "initial direction");
    require_unit(wT, "target direction");
    const double theta = angle_between(a0, wT);
    QubitPlan plan = geodesic_plan(a0, circle_tangent(a0, wT, plane_hint), theta / (n + 1), n);
    plan.objective = optimal_objective(theta, n);
    return plan;
}

QubitPlan equal_time_sequence(const BlochVector& a0, const BlochVector& wT, int n,
                              std::optional<BlochVector> plane_hint) {
    require_positive_count(n);
    require_unit(a0, "initial direction");
    require_unit(wT, "target direction");
    const double theta = angle_between(a0, wT);
    QubitPlan plan = geodesic_plan(a0, circle_tangent(a0, wT, plane_hint), theta / n, n);
    // Pin the endpoint exactly; the parametrised value carries rounding.
    const double length = std::pow(std::cos(theta / n), n);
    plan.directions.back() = wT;
    plan.predicted_states.back() = length * wT;
    plan.objective = equal_time_objective(theta, n);
    return plan;
}

double optimal_objective(double theta, int n) {
    require_positive_count(n);
    return 0.5 * (1.0 + std::pow(std::cos(theta / (n + 1)), n + 1));
}

double equal_time_objective(double theta, int n) {
    require_positive_count(n);
    return 0.5 * (1.0 + std::pow(std::cos(theta / n), n));
}

double qubit_objective(const BlochVector& a0, const BlochVector& wT, std::span<const BlochVector> directions) {
    BlochVector b = a0;
    for (const auto& w : directions) b = measure_bloch(b, w);
    return 0.5 * (1.0 + b.dot(wT));
}

}  // namespace backaction
