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

#include <optional>
#include <span>
#include <vector>

#include "backaction/quantum.hpp"

namespace backaction {

/// Real 3-vector b with rho = (I + b.sigma) / 2. Unit vectors double as
/// measurement directions w (projector (I + w.sigma) / 2).
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    BlochVector normalized() const;

    friend BlochVector operator+(const BlochVector& a, const BlochVector& b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend BlochVector operator-(const BlochVector& a, const BlochVector& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend BlochVector operator-(const BlochVector& a) { return {-a.x, -a.y, -a.z}; }
    friend BlochVector operator*(double s, const BlochVector& a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Polar angle theta in [0, pi] from +z, azimuth phi from +x.
struct SphereAngles {
    double theta = 0.0;
    double phi = 0.0;
    friend bool operator==(const SphereAngles&, const SphereAngles&) = default;
};

BlochVector direction_from_angles(SphereAngles a);
/// phi is reported in [0, 2pi); at the poles phi = 0.
SphereAngles angles_from_direction(const BlochVector& w);

/// Angle between two vectors via the clamped arccos of their normalised dot product.
double angle_between(const BlochVector& a, const BlochVector& b);

inline constexpr double kUnitNormTolerance = 1e-10;

/// Throws ValidationError unless | |w| - 1 | <= 1e-10.
void require_unit(const BlochVector& w, const char* what);

/// (I + b.sigma) / 2 as a plain Hermitian operator; no norm constraint.
HermitianOperator bloch_operator(const BlochVector& b);

DensityMatrix bloch_to_rho(const BlochVector& b);
BlochVector rho_to_bloch(const DensityMatrix& rho);

/// Rank-one projector (I + w.sigma) / 2 for a unit w.
HermitianOperator projector_from_direction(const BlochVector& w);
/// Eigenspaces {(1, (I + w.sigma)/2), (0, (I - w.sigma)/2)} built without an eigensolver.
SpectralDecomposition measurement_from_direction(const BlochVector& w);

/// Non-selective measurement along w acting on the Bloch ball: b -> (b.w) w.
BlochVector measure_bloch(const BlochVector& b, const BlochVector& w);

/// Measurement directions w_i, the post-measurement Bloch vectors b_i, and
/// the resulting expectation of (I + wT.sigma) / 2.
struct QubitPlan {
    std::vector<BlochVector> directions;
    std::vector<BlochVector> predicted_states;
    double objective = 0.0;
};

/// Maximiser of Tr[rho_N (I + wT.sigma)/2] over n projective measurements.
///
/// The expectation equals (1 + prod_k w_k.w_{k+1}) / 2 along the chain
/// a0 = w_0, w_1, ..., w_n, w_{n+1} = wT: n + 1 links whose angles sum to at
/// least theta = angle(a0, wT). log cos is concave, so the product peaks when
/// every link spans theta / (n + 1). The directions are equally spaced on the
/// great circle from a0 toward wT, b_i = cos^i(theta/(n+1)) w_i and the optimum
/// is (1 + cos^{n+1}(theta/(n+1))) / 2.
///
/// For antipodal endpoints the great circle is not unique; `plane_hint` picks
/// the one through a0 and the hint (default +x, or +y when a0 lies on the x axis).
QubitPlan analytic_optimal_sequence(const BlochVector& a0, const BlochVector& wT, int n,
                                    std::optional<BlochVector> plane_hint = std::nullopt);

/// Equal-time discretisation of the anti-Zeno path: w_i at angle i*theta/n on
/// the same great circle, so the last measurement is of the target itself.
/// Objective (1 + cos^n(theta/n)) / 2, which is below the optimum for theta > 0.
QubitPlan equal_time_sequence(const BlochVector& a0, const BlochVector& wT, int n,
                              std::optional<BlochVector> plane_hint = std::nullopt);

double optimal_objective(double theta, int n);
double equal_time_objective(double theta, int n);

/// (1 + b_N.wT) / 2 after folding measure_bloch over `directions`.
double qubit_objective(const BlochVector& a0, const BlochVector& wT, std::span<const BlochVector> directions);

}  // namespace backaction
