// Copyright 2026 The cohprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cohprobe/hilbert.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cohprobe/errors.hpp"

namespace cohprobe {

SpaceDescriptor build_space(int fock_dim, double mass, double omega, const UnitSystem& units) {
    if (fock_dim < 2) {
        throw DomainError("fock_dim must be >= 2, got " + std::to_string(fock_dim));
    }
    if (!(mass > 0.0)) throw DomainError("mass must be positive");
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    if (!(units.hbar > 0.0)) throw DomainError("hbar must be positive");

    SpaceDescriptor s;
    s.fock_dim = fock_dim;
    s.hbar = units.hbar;
    s.delta_x = std::sqrt(units.hbar / (2.0 * mass * omega));
    s.delta_p = std::sqrt(mass * units.hbar * omega / 2.0);
    return s;
}

CompositeOperator::CompositeOperator(Matrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0) {
        throw DomainError("composite operator must be square with even dimension");
    }
    if (hermitian_) {
        const double scale = m_.cwiseAbs().maxCoeff();
        const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * std::max(scale, 1e-300)) {
            throw DomainError("operator flagged Hermitian deviates by " + std::to_string(asym));
        }
    }
}

OscillatorOperators oscillator_operators(const SpaceDescriptor& space) {
    const int n = space.fock_dim;
    OscillatorOperators ops;
    ops.a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
    ops.adag = ops.a.adjoint();
    ops.x = space.delta_x * (ops.a + ops.adag);
    ops.p = Complex(0.0, space.delta_p) * (ops.adag - ops.a);
    ops.number = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) ops.number(k, k) = static_cast<double>(k);
    return ops;
}

namespace pauli {
QubitMatrix identity() { return QubitMatrix::Identity(); }
QubitMatrix sigma_x() {
    QubitMatrix m;
    m << 0, 1, 1, 0;
    return m;
}
QubitMatrix sigma_y() {
    QubitMatrix m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}
QubitMatrix sigma_z() {
    QubitMatrix m;
    m << 1, 0, 0, -1;
    return m;
}
}  // namespace pauli

CompositeOperator embed(const QubitMatrix& qubit_op, const Matrix& osc_op, bool hermitian) {
    if (osc_op.rows() != osc_op.cols() || osc_op.rows() < 2) {
        throw DomainError("oscillator operator must be square with dimension >= 2");
    }
    const Eigen::Index n = osc_op.rows();
    Matrix m(2 * n, 2 * n);
    for (int q = 0; q < 2; ++q) {
        for (int qp = 0; qp < 2; ++qp) m.block(q * n, qp * n, n, n) = qubit_op(q, qp) * osc_op;
    }
    return CompositeOperator(std::move(m), hermitian);
}

CompositeDensity::CompositeDensity(Matrix rho, double time) : rho_(std::move(rho)), time_(time) {
    if (rho_.rows() != rho_.cols() || rho_.rows() < 4 || rho_.rows() % 2 != 0) {
        throw DomainError("density must be square with even dimension >= 4");
    }
}

double min_eigenvalue(const Matrix& rho) {
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

StateCheck validate(const CompositeDensity& rho) {
    const Matrix& m = rho.matrix();
    return {std::abs(m.trace() - 1.0), (m - m.adjoint()).cwiseAbs().maxCoeff(), min_eigenvalue(m)};
}

namespace {
void require_same_dim(Eigen::Index a, Eigen::Index b) {
    if (a != b) {
        throw DomainError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}
}  // namespace

Complex expectation(const CompositeOperator& op, const CompositeDensity& rho) {
    require_same_dim(op.dim(), rho.total_dim());
    // trace(A rho) without forming the product
    return (op.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

QubitMatrix partial_trace_oscillator(const CompositeDensity& rho) {
    QubitMatrix r;
    for (int q = 0; q < 2; ++q) {
        for (int qp = 0; qp < 2; ++qp) r(q, qp) = rho.block(q, qp).trace();
    }
    return r;
}

Matrix partial_trace_qubit(const CompositeDensity& rho) { return rho.block(0, 0) + rho.block(1, 1); }

double qubit_coherence(const QubitMatrix& rho_q) { return 2.0 * std::abs(rho_q(0, 1)); }

double purity(const Matrix& rho) {
    // trace(rho^2) = sum_ij rho_ij rho_ji; equals sum |rho_ij|^2 for Hermitian rho
    return (rho.transpose().cwiseProduct(rho)).sum().real();
}

double trace_distance(const Matrix& a, const Matrix& b) {
    require_same_dim(a.rows(), b.rows());
    const Matrix d = a - b;
    const Matrix herm = 0.5 * (d + d.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity_with_pure(const Vector& psi, const Matrix& rho) {
    require_same_dim(psi.size(), rho.rows());
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

}  // namespace cohprobe
