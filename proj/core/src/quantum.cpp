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

#include "backaction/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "backaction/errors.hpp"

namespace backaction {
namespace {

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << " must be a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw ValidationError(os.str());
    }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw ValidationError(os.str());
    }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

Eigen::SelfAdjointEigenSolver<ComplexMatrix> solve_hermitian(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigensolver did not converge");
    }
    return solver;
}

}  // namespace

double hermiticity_violation(const ComplexMatrix& m) {
    require_square(m, "matrix");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix identity_matrix(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

HermitianOperator::HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)) {
    require_square(matrix_, "Hermitian operator");
    const double violation = hermiticity_violation(matrix_);
    if (!(violation <= tolerance::kHermitian)) {
        std::ostringstream os;
        os << "operator is not Hermitian: max |M - M^dagger| = " << violation;
        throw ValidationError(os.str());
    }
}

HermitianOperator::HermitianOperator(ComplexMatrix m, Trusted) : matrix_(hermitian_part(m)) {}

HermitianOperator HermitianOperator::assume_valid(ComplexMatrix m) {
    return HermitianOperator(std::move(m), Trusted{});
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    require_square(matrix_, "density matrix");
    const double violation = hermiticity_violation(matrix_);
    if (!(violation <= tolerance::kHermitian)) {
        std::ostringstream os;
        os << "density matrix is not Hermitian: max |M - M^dagger| = " << violation;
        throw ValidationError(os.str());
    }
    const Complex trace = matrix_.trace();
    if (!(std::abs(trace - 1.0) <= tolerance::kTrace)) {
        std::ostringstream os;
        os << "density matrix trace is " << trace.real() << (trace.imag() < 0 ? "" : "+") << trace.imag()
           << "i, expected 1";
        throw ValidationError(os.str());
    }
    const double min_eig = hermitian_eigenvalues(matrix_).minCoeff();
    if (min_eig < -tolerance::kPositivity) {
        std::ostringstream os;
        os << "density matrix is not positive semidefinite: min eigenvalue " << min_eig;
        throw ValidationError(os.str());
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix m, Trusted) : matrix_(hermitian_part(m)) {}

DensityMatrix DensityMatrix::assume_valid(ComplexMatrix m) { return DensityMatrix(std::move(m), Trusted{}); }

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
    if (dim < 1) throw ValidationError("dimension must be positive");
    return DensityMatrix(identity_matrix(dim) / static_cast<double>(dim), Trusted{});
}

DensityMatrix DensityMatrix::basis_state(Eigen::Index dim, Eigen::Index k) {
    if (dim < 1 || k < 0 || k >= dim) throw ValidationError("basis index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityMatrix(std::move(m), Trusted{});
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
    ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i) out += eigenvalues[i] * projectors[i];
    return out;
}

SystemModel::SystemModel(HermitianOperator h0, HermitianOperator mu) : h0_(std::move(h0)), mu_(std::move(mu)) {
    require_same_dim(h0_.dim(), mu_.dim(), "system model h0/mu");
}

SpectralDecomposition spectral_decompose(const HermitianOperator& q, double cluster_tol) {
    if (!(cluster_tol > 0.0)) throw ValidationError("cluster tolerance must be positive");
    const auto solver = solve_hermitian(q.matrix());
    const Eigen::VectorXd& values = solver.eigenvalues();
    const ComplexMatrix& vectors = solver.eigenvectors();
    const Eigen::Index dim = q.dim();

    // Eigen returns ascending eigenvalues; walk from the top so the output is descending.
    SpectralDecomposition out;
    Eigen::Index i = dim - 1;
    while (i >= 0) {
        Eigen::Index lo = i;
        while (lo > 0 && values(lo) - values(lo - 1) <= cluster_tol) --lo;
        const auto block = vectors.middleCols(lo, i - lo + 1);
        out.eigenvalues.push_back(values.segment(lo, i - lo + 1).mean());
        out.projectors.push_back(block * block.adjoint());
        i = lo - 1;
    }
    return out;
}

ComplexMatrix measurement_channel(const ComplexMatrix& x, const SpectralDecomposition& d) {
    require_same_dim(x.rows(), d.dim(), "measurement");
    ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
    for (const auto& p : d.projectors) out.noalias() += p * x * p;
    return out;
}

DensityMatrix apply_measurement(const DensityMatrix& rho, const SpectralDecomposition& d) {
    return DensityMatrix::assume_valid(measurement_channel(rho.matrix(), d));
}

DensityMatrix apply_measurement(const DensityMatrix& rho, const HermitianOperator& q) {
    require_same_dim(rho.dim(), q.dim(), "measurement");
    return apply_measurement(rho, spectral_decompose(q));
}

DensityMatrix apply_sequence(const DensityMatrix& rho, std::span<const HermitianOperator> qs) {
    DensityMatrix state = rho;
    for (const auto& q : qs) state = apply_measurement(state, q);
    return state;
}

ComplexMatrix propagator(const SystemModel& model, double u, double dt) {
    if (!(dt >= 0.0)) throw ValidationError("evolution time must be non-negative");
    const Eigen::Index dim = model.dim();
    if (dt == 0.0) return identity_matrix(dim);
    const ComplexMatrix generator = model.h0().matrix() - u * model.mu().matrix();
    const auto solver = solve_hermitian(generator);
    const Eigen::VectorXcd phases =
        (solver.eigenvalues() * dt).unaryExpr([](double a) { return std::polar(1.0, -a); });
    const ComplexMatrix& v = solver.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
    require_same_dim(rho.dim(), u.rows(), "unitary evolution");
    return DensityMatrix::assume_valid(u * rho.matrix() * u.adjoint());
}

DensityMatrix evolve_unitary(const DensityMatrix& rho, const SystemModel& model, double u, double dt) {
    require_same_dim(rho.dim(), model.dim(), "unitary evolution");
    if (!(dt >= 0.0)) throw ValidationError("evolution time must be non-negative");
    if (dt == 0.0) return rho;
    return apply_unitary(rho, propagator(model, u, dt));
}

double trace_product(const ComplexMatrix& x, const ComplexMatrix& o) {
    // Tr[X O] = sum_ij X_ij O_ji
    return (x.array() * o.transpose().array()).sum().real();
}

double expectation(const DensityMatrix& rho, const HermitianOperator& o) {
    require_same_dim(rho.dim(), o.dim(), "expectation");
    const Complex value = (rho.matrix().array() * o.matrix().transpose().array()).sum();
    if (std::abs(value.imag()) >= tolerance::kImaginaryResidue) {
        std::ostringstream os;
        os << "expectation has imaginary residue " << value.imag();
        throw NumericalError(os.str());
    }
    return value.real();
}

double purity(const DensityMatrix& rho) { return trace_product(rho.matrix(), rho.matrix()); }

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    require_square(m, "matrix");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
    return solver.eigenvalues();
}

}  // namespace backaction
