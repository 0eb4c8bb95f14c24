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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace backaction {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kImaginaryResidue = 1e-10;
inline constexpr double kCluster = 1e-8;
}  // namespace tolerance

/// Largest entrywise modulus of M - M^dagger. Requires a square matrix.
double hermiticity_violation(const ComplexMatrix& m);

ComplexMatrix identity_matrix(Eigen::Index dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// A complex matrix equal to its conjugate transpose (entrywise, within 1e-12).
///
/// Holds observables, target operators, and Hamiltonian terms. Validation
/// happens once, on construction.
class HermitianOperator {
   public:
    explicit HermitianOperator(ComplexMatrix m);

    /// Skips validation; for results of operations already known to be Hermitian.
    /// The matrix is symmetrised to remove rounding asymmetry.
    static HermitianOperator assume_valid(ComplexMatrix m);

    const ComplexMatrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

   private:
    struct Trusted {};
    HermitianOperator(ComplexMatrix m, Trusted);

    ComplexMatrix matrix_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
   public:
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix assume_valid(ComplexMatrix m);
    static DensityMatrix maximally_mixed(Eigen::Index dim);
    /// |k><k| in the computational basis.
    static DensityMatrix basis_state(Eigen::Index dim, Eigen::Index k);

    const ComplexMatrix& matrix() const { return matrix_; }
    Eigen::Index dim() const { return matrix_.rows(); }

   private:
    struct Trusted {};
    DensityMatrix(ComplexMatrix m, Trusted);

    ComplexMatrix matrix_;
};

/// Eigenspaces of an observable: Q = sum_i q_i P_i with distinct q_i.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<ComplexMatrix> projectors;

    std::size_t size() const { return eigenvalues.size(); }
    Eigen::Index dim() const { return projectors.empty() ? 0 : projectors.front().rows(); }
    ComplexMatrix reconstruct() const;
};

/// Free Hamiltonian h0 and dipole operator mu; the controlled generator is h0 - u * mu.
class SystemModel {
   public:
    SystemModel(HermitianOperator h0, HermitianOperator mu);

    const HermitianOperator& h0() const { return h0_; }
    const HermitianOperator& mu() const { return mu_; }
    Eigen::Index dim() const { return h0_.dim(); }

   private:
    HermitianOperator h0_;
    HermitianOperator mu_;
};

/// Eigenvalues closer than `cluster_tol` (chained, in sorted order) share one
/// eigenspace. Pairs are returned in descending eigenvalue order.
SpectralDecomposition spectral_decompose(const HermitianOperator& q,
                                         double cluster_tol = tolerance::kCluster);

/// sum_i P_i X P_i. The channel is self-dual, so this serves both the
/// Schroedinger (states) and Heisenberg (observables) pictures.
ComplexMatrix measurement_channel(const ComplexMatrix& x, const SpectralDecomposition& d);

/// Non-selective measurement of `q`: rho -> sum_i P_i rho P_i.
DensityMatrix apply_measurement(const DensityMatrix& rho, const HermitianOperator& q);
DensityMatrix apply_measurement(const DensityMatrix& rho, const SpectralDecomposition& d);

/// M_{Q_N} o ... o M_{Q_1}(rho); the first element is measured first.
DensityMatrix apply_sequence(const DensityMatrix& rho, std::span<const HermitianOperator> qs);

/// exp(-i (h0 - mu u) dt) via the eigendecomposition of the generator.
ComplexMatrix propagator(const SystemModel& model, double u, double dt);

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u);
DensityMatrix evolve_unitary(const DensityMatrix& rho, const SystemModel& model, double u, double dt);

/// Tr[rho O]; throws NumericalError if the imaginary residue exceeds 1e-10.
double expectation(const DensityMatrix& rho, const HermitianOperator& o);
/// Re Tr[x O] for arbitrary square x (no validation of x).
double trace_product(const ComplexMatrix& x, const ComplexMatrix& o);

double purity(const DensityMatrix& rho);

/// Ascending eigenvalues of a Hermitian matrix.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

}  // namespace backaction
