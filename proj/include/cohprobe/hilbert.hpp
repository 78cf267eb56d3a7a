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

#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cohprobe/units.hpp"

namespace cohprobe {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using QubitMatrix = Eigen::Matrix2cd;

/// Truncated Fock space of the oscillator together with its quadrature
/// scales. The composite space is qubit (x) oscillator, qubit factor first,
/// so composite index = qubit * fock_dim + n.
struct SpaceDescriptor {
    int fock_dim = 0;
    double delta_x = 0.0;  // sqrt(hbar / 2 m omega)
    double delta_p = 0.0;  // sqrt(m hbar omega / 2)
    double hbar = 1.0;

    int total_dim() const { return 2 * fock_dim; }
};

SpaceDescriptor build_space(int fock_dim, double mass, double omega,
                            const UnitSystem& units = UnitSystem::natural());

/// A dense operator on the composite space. When constructed with
/// `hermitian = true` the claim is checked against max|M - M^dag|.
class CompositeOperator {
public:
    explicit CompositeOperator(Matrix m, bool hermitian = false);

    const Matrix& matrix() const { return m_; }
    bool hermitian() const { return hermitian_; }
    int dim() const { return static_cast<int>(m_.rows()); }

private:
    Matrix m_;
    bool hermitian_;
};

/// Ladder and quadrature operators on the oscillator factor alone:
/// x = delta_x (a + a^dag), p = i delta_p (a^dag - a).
struct OscillatorOperators {
    Matrix a;
    Matrix adag;
    Matrix x;
    Matrix p;
    Matrix number;
};

OscillatorOperators oscillator_operators(const SpaceDescriptor& space);

namespace pauli {
QubitMatrix identity();
QubitMatrix sigma_x();
QubitMatrix sigma_y();
QubitMatrix sigma_z();
}  // namespace pauli

/// Kronecker product qubit_op (x) osc_op.
CompositeOperator embed(const QubitMatrix& qubit_op, const Matrix& osc_op, bool hermitian = false);

/// Density operator on the composite space plus the time it refers to.
/// Mutated only by its owner; validity is spot-checked with validate().
class CompositeDensity {
public:
    CompositeDensity() = default;
    explicit CompositeDensity(Matrix rho, double time = 0.0);

    const Matrix& matrix() const { return rho_; }
    Matrix& matrix() { return rho_; }
    int fock_dim() const { return static_cast<int>(rho_.rows()) / 2; }
    int total_dim() const { return static_cast<int>(rho_.rows()); }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    Complex trace() const { return rho_.trace(); }

    /// Oscillator block <q| rho |q'> as an N x N view.
    auto block(int q, int qp) const {
        const int n = fock_dim();
        return rho_.block(q * n, qp * n, n, n);
    }

private:
    Matrix rho_;
    double time_ = 0.0;
};

struct StateCheck {
    double trace_deviation;
    double hermiticity;  // max |rho - rho^dag|
    double min_eigenvalue;
};

/// Full eigen-decomposition check of a state; expensive, for spot checks.
StateCheck validate(const CompositeDensity& rho);

Complex expectation(const CompositeOperator& op, const CompositeDensity& rho);

/// Reduced qubit state obtained by tracing out the oscillator.
QubitMatrix partial_trace_oscillator(const CompositeDensity& rho);

/// Reduced oscillator state obtained by tracing out the qubit.
Matrix partial_trace_qubit(const CompositeDensity& rho);

/// C = 2 |<0| rho_Q |1>|.
double qubit_coherence(const QubitMatrix& rho_q);

double purity(const Matrix& rho);
double min_eigenvalue(const Matrix& rho);  // of the Hermitian part
double trace_distance(const Matrix& a, const Matrix& b);

/// <psi| rho |psi> for a normalized pure reference state.
double fidelity_with_pure(const Vector& psi, const Matrix& rho);

}  // namespace cohprobe
