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

#include "cohprobe/liouvillian.hpp"

#include <algorithm>
#include <cmath>

#include "cohprobe/errors.hpp"

namespace cohprobe {

BandedOperator BandedOperator::from_dense(const Matrix& m, double drop_below) {
    if (m.rows() != m.cols()) throw DomainError("banded operator must be square");
    const int n = static_cast<int>(m.rows());
    BandedOperator op(n);
    for (int d = -(n - 1); d <= n - 1; ++d) {
        const int lo = std::max(0, -d);
        const int hi = std::min(n, n - d);
        bool keep = false;
        for (int i = lo; i < hi && !keep; ++i) keep = std::abs(m(i, i + d)) > drop_below;
        if (!keep) continue;
        Diagonal& diag = op.diagonal(d);
        for (int i = lo; i < hi; ++i) diag.values[i] = m(i, i + d);
    }
    return op;
}

BandedOperator::Diagonal& BandedOperator::diagonal(int offset) {
    auto it = std::find_if(diagonals_.begin(), diagonals_.end(),
                           [offset](const Diagonal& d) { return d.offset == offset; });
    if (it != diagonals_.end()) return *it;
    diagonals_.push_back({offset, std::vector<Complex>(dim_, Complex(0.0))});
    std::sort(diagonals_.begin(), diagonals_.end(),
              [](const Diagonal& a, const Diagonal& b) { return a.offset < b.offset; });
    return diagonal(offset);
}

Complex BandedOperator::at(int row, int col) const {
    for (const auto& d : diagonals_) {
        if (col - row == d.offset) return d.values[row];
    }
    return 0.0;
}

Matrix BandedOperator::to_dense() const {
    Matrix m = Matrix::Zero(dim_, dim_);
    for (const auto& d : diagonals_) {
        const int lo = std::max(0, -d.offset);
        const int hi = std::min(dim_, dim_ - d.offset);
        for (int i = lo; i < hi; ++i) m(i, i + d.offset) = d.values[i];
    }
    return m;
}

void BandedOperator::add(const BandedOperator& other, Complex c) {
    if (other.dim_ != dim_) throw DomainError("banded operator dimension mismatch");
    for (const auto& d : other.diagonals_) {
        Diagonal& mine = diagonal(d.offset);
        for (int i = 0; i < dim_; ++i) mine.values[i] += c * d.values[i];
    }
}

Matrix branch_hamiltonian(int q, const PhysicalParams& p, const SpaceDescriptor& space) {
    const OscillatorOperators ops = oscillator_operators(space);
    const double s = q == 0 ? 1.0 : -1.0;
    const int n = space.fock_dim;
    // hbar omega (a^dag a + 1/2) is exact on the truncated space, unlike the
    // p^2/2m + m omega^2 x^2/2 product form whose top level is corrupted.
    Matrix h = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) h(k, k) = space.hbar * p.omega * (k + 0.5) + s * p.lambda;
    h += s * p.epsilon * ops.x;
    return h;
}

namespace {

struct DissipatorRates {
    double down;  // coefficient of D[a]
    double up;    // coefficient of D[a^dag]
};

DissipatorRates optical_rates(const PhysicalParams& p) {
    const double nbar = thermal_occupation(p);
    return {2.0 * p.gamma * (nbar + 1.0), 2.0 * p.gamma * nbar};
}

void check_space(const PhysicalParams& p, const SpaceDescriptor& space) {
    p.validate();
    const SpaceDescriptor expect = build_space(space.fock_dim, p.mass, p.omega, p.units);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
    if (!close(space.delta_x, expect.delta_x) || !close(space.delta_p, expect.delta_p)) {
        throw DomainError("space descriptor does not match the oscillator parameters");
    }
}

// dst[m] += sum_d op(m, m+d) src[m+d]
inline void accumulate_left(const BandedOperator& op, const Complex* src, Complex* dst, int n) {
    for (const auto& d : op.diagonals()) {
        const int lo = std::max(0, -d.offset);
        const int hi = std::min(n, n - d.offset);
        const Complex* v = d.values.data();
        const Complex* s = src + d.offset;
        for (int m = lo; m < hi; ++m) dst[m] += v[m] * s[m];
    }
}

// dst[:] += sum_k B(:, k) op(k, col) for the block B with column stride ld
inline void accumulate_right(const BandedOperator& op, const Complex* block, Eigen::Index ld, int col,
                             Complex* dst, int n) {
    for (const auto& d : op.diagonals()) {
        const int k = col - d.offset;
        if (k < 0 || k >= n) continue;
        const Complex c = d.values[k];
        if (c == Complex(0.0)) continue;
        const Complex* s = block + k * ld;
        for (int m = 0; m < n; ++m) dst[m] += c * s[m];
    }
}

}  // namespace

Liouvillian::Liouvillian(const PhysicalParams& p, const SpaceDescriptor& space, DissipatorKind kind)
    : n_(space.fock_dim) {
    check_space(p, space);
    const OscillatorOperators ops = oscillator_operators(space);
    const Complex i_over_hbar(0.0, 1.0 / space.hbar);

    for (int q = 0; q < 2; ++q) {
        const Matrix h = branch_hamiltonian(q, p, space);
        left_[q] = BandedOperator::from_dense(-i_over_hbar * h);
        right_[q] = BandedOperator::from_dense(i_over_hbar * h);
    }
    if (p.gamma == 0.0) return;

    Matrix extra_left;
    Matrix extra_right;
    if (kind == DissipatorKind::QuantumOptical) {
        const DissipatorRates r = optical_rates(p);
        const Matrix anti = -0.5 * (r.down * ops.adag * ops.a + r.up * ops.a * ops.adag);
        extra_left = anti;
        extra_right = anti;
        sandwiches_.push_back({BandedOperator::from_dense(r.down * ops.a), BandedOperator::from_dense(ops.adag)});
        if (r.up > 0.0) {
            sandwiches_.push_back({BandedOperator::from_dense(r.up * ops.adag), BandedOperator::from_dense(ops.a)});
        }
    } else {
        const double g = p.gamma / space.hbar;
        const double d = diffusion_coefficient(p) / (space.hbar * space.hbar);
        const Complex ig(0.0, g);
        const Matrix x2 = ops.x * ops.x;
        extra_left = -ig * (ops.x * ops.p) - d * x2;
        extra_right = ig * (ops.p * ops.x) - d * x2;
        // x rho (-i g p + 2 d x) and (i g p) rho x
        sandwiches_.push_back({BandedOperator::from_dense(ops.x),
                               BandedOperator::from_dense(-ig * ops.p + 2.0 * d * ops.x)});
        sandwiches_.push_back({BandedOperator::from_dense(ig * ops.p), BandedOperator::from_dense(ops.x)});
    }
    for (int q = 0; q < 2; ++q) {
        left_[q].add(BandedOperator::from_dense(extra_left));
        right_[q].add(BandedOperator::from_dense(extra_right));
    }
}

void Liouvillian::apply(const Matrix& rho, Matrix& out) const {
    const int n = n_;
    if (rho.rows() != 2 * n || rho.cols() != 2 * n) throw DomainError("density dimension does not match generator");
    if (out.rows() != 2 * n || out.cols() != 2 * n) out.resize(2 * n, 2 * n);
    const Eigen::Index ld = 2 * n;
    const Complex* in = rho.data();
    Complex* res = out.data();

#pragma omp parallel
    {
        std::vector<Complex> tmp(n);
#pragma omp for collapse(2) schedule(static)
        for (int b = 0; b < 4; ++b) {
            for (int col = 0; col < n; ++col) {
                const int q = b >> 1;
                const int qp = b & 1;
                const Complex* block = in + (qp * n) * ld + q * n;
                Complex* dst = res + (qp * n + col) * ld + q * n;
                std::fill(dst, dst + n, Complex(0.0));
                accumulate_left(left_[q], block + col * ld, dst, n);
                accumulate_right(right_[qp], block, ld, col, dst, n);
                for (const Sandwich& s : sandwiches_) {
                    std::fill(tmp.begin(), tmp.end(), Complex(0.0));
                    accumulate_right(s.right, block, ld, col, tmp.data(), n);
                    accumulate_left(s.left, tmp.data(), dst, n);
                }
            }
        }
    }
}

Matrix rhs_reference(const Matrix& rho, const PhysicalParams& p, const SpaceDescriptor& space,
                     DissipatorKind kind) {
    check_space(p, space);
    const int n = space.fock_dim;
    if (rho.rows() != 2 * n || rho.cols() != 2 * n) throw DomainError("density dimension does not match space");

    const OscillatorOperators ops = oscillator_operators(space);
    Matrix h = Matrix::Zero(2 * n, 2 * n);
    h.block(0, 0, n, n) = branch_hamiltonian(0, p, space);
    h.block(n, n, n, n) = branch_hamiltonian(1, p, space);
    const Complex i_over_hbar(0.0, 1.0 / space.hbar);

    Matrix out = -i_over_hbar * (h * rho - rho * h);
    if (p.gamma == 0.0) return out;

    const QubitMatrix id = pauli::identity();
    if (kind == DissipatorKind::QuantumOptical) {
        const DissipatorRates r = optical_rates(p);
        const Matrix a = embed(id, ops.a).matrix();
        const Matrix ad = embed(id, ops.adag).matrix();
        const Matrix ada = ad * a;
        const Matrix aad = a * ad;
        out += r.down * (a * rho * ad - 0.5 * (ada * rho + rho * ada));
        out += r.up * (ad * rho * a - 0.5 * (aad * rho + rho * aad));
    } else {
        const Matrix x = embed(id, ops.x).matrix();
        const Matrix pm = embed(id, ops.p).matrix();
        const double g = p.gamma / space.hbar;
        const double d = diffusion_coefficient(p) / (space.hbar * space.hbar);
        const Matrix anti = pm * rho + rho * pm;
        const Matrix comm = x * rho - rho * x;
        out += Complex(0.0, -g) * (x * anti - anti * x);
        out -= d * (x * comm - comm * x);
    }
    return out;
}

}  // namespace cohprobe
