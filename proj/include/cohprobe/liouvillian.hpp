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

#include <array>
#include <vector>

#include "cohprobe/analytic.hpp"
#include "cohprobe/hilbert.hpp"

namespace cohprobe {

enum class DissipatorKind { QuantumOptical, CaldeiraLeggett };

/// Square operator stored by diagonals: entry (i, i + offset) lives at
/// values[i] of the diagonal with that offset. Entries outside the matrix
/// are kept as zeros so every diagonal has length dim.
class BandedOperator {
public:
    struct Diagonal {
        int offset;
        std::vector<Complex> values;
    };

    BandedOperator() = default;
    explicit BandedOperator(int dim) : dim_(dim) {}

    /// Keeps every diagonal of `m` that has an entry above `drop_below`.
    static BandedOperator from_dense(const Matrix& m, double drop_below = 0.0);

    int dim() const { return dim_; }
    const std::vector<Diagonal>& diagonals() const { return diagonals_; }

    Complex at(int row, int col) const;
    Matrix to_dense() const;

    /// Accumulates c * other into this operator.
    void add(const BandedOperator& other, Complex c = 1.0);

private:
    Diagonal& diagonal(int offset);

    int dim_ = 0;
    std::vector<Diagonal> diagonals_;
};

/// The master-equation generator in qubit-block form. Every term of the
/// dynamics acts on <q| rho |q'> as
///     left[q] * B + B * right[q'] + sum_s A_s * B * C_s
/// with banded oscillator operators, so one application is O(N^2) per block.
///
///   caldeira-leggett:  -(i/hbar)[H,rho] - (i gamma/hbar)[x,{p,rho}] - (D/hbar^2)[x,[x,rho]]
///   quantum-optical:   -(i/hbar)[H,rho] + 2 gamma (nbar+1) D[a] rho + 2 gamma nbar D[a^dag] rho
class Liouvillian {
public:
    struct Sandwich {
        BandedOperator left;
        BandedOperator right;
    };

    Liouvillian(const PhysicalParams& p, const SpaceDescriptor& space, DissipatorKind kind);

    int fock_dim() const { return n_; }

    /// out = L(rho). OpenMP-parallel over (block, column); every output
    /// element is written by exactly one thread in a fixed order, so results
    /// do not depend on the thread count. `out` must not alias `rho`.
    void apply(const Matrix& rho, Matrix& out) const;

    const BandedOperator& left(int q) const { return left_[q]; }
    const BandedOperator& right(int q) const { return right_[q]; }
    const std::vector<Sandwich>& sandwiches() const { return sandwiches_; }

private:
    int n_;
    std::array<BandedOperator, 2> left_;
    std::array<BandedOperator, 2> right_;
    std::vector<Sandwich> sandwiches_;
};

/// Oscillator Hamiltonian restricted to the qubit branch q (sigma_z = +1 for
/// q = 0): hbar omega (n + 1/2) + s lambda + s epsilon x.
Matrix branch_hamiltonian(int q, const PhysicalParams& p, const SpaceDescriptor& space);

/// Dense serial evaluation of the same generator from full composite
/// operators. Kept as the reference the banded kernel is tested against.
Matrix rhs_reference(const Matrix& rho, const PhysicalParams& p, const SpaceDescriptor& space,
                     DissipatorKind kind);

}  // namespace cohprobe
