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

#include <doctest.h>

#include <cmath>

#include "cohprobe/dynamics.hpp"
#include "cohprobe/errors.hpp"
#include "cohprobe/liouvillian.hpp"
#include "cohprobe/states.hpp"
#include "oracles.hpp"

using namespace cohprobe;

namespace {

Matrix random_density(int dim, unsigned seed) {
    std::srand(seed);
    const Matrix g = Matrix::Random(dim, dim);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

PhysicalParams busy_params() {
    PhysicalParams p;
    p.mass = 1.7;
    p.omega = 0.8;
    p.gamma = 0.03;
    p.theta = 1.3;
    p.epsilon = 0.45;
    p.lambda = 0.2;
    return p;
}

}  // namespace

TEST_SUITE("liouvillian") {
    TEST_CASE("banded storage round trip") {
        const int n = 9;
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            m(i, i) = Complex(i, -i);
            if (i + 2 < n) m(i, i + 2) = Complex(0.5, i);
            if (i >= 1) m(i, i - 1) = Complex(-1.0, 0.25 * i);
        }
        const BandedOperator b = BandedOperator::from_dense(m);
        CHECK(b.diagonals().size() == 3);
        CHECK((b.to_dense() - m).norm() == 0.0);
        CHECK(b.at(3, 5) == m(3, 5));
        CHECK(b.at(3, 7) == Complex(0.0));
        BandedOperator c = b;
        c.add(b, Complex(0.0, 2.0));
        CHECK((c.to_dense() - Complex(1.0, 2.0) * m).norm() < 1e-14);
    }

    TEST_CASE("banded kernel matches the dense reference") {
        for (DissipatorKind kind : {DissipatorKind::QuantumOptical, DissipatorKind::CaldeiraLeggett}) {
            for (int n : {4, 17, 40}) {
                const PhysicalParams p = busy_params();
                const SpaceDescriptor s = build_space(n, p.mass, p.omega, p.units);
                const Matrix rho = random_density(2 * n, 100 + n);
                const Matrix dense = rhs_reference(rho, p, s, kind);
                Matrix banded;
                Liouvillian(p, s, kind).apply(rho, banded);
                CHECK(max_abs(banded - dense) <= 1e-12 * max_abs(dense));
            }
        }
    }

    TEST_CASE("kernels agree in SI units") {
        const PhysicalParams p = flux_lc_realization({});
        const SpaceDescriptor s = build_space(12, p.mass, p.omega, p.units);
        const Matrix rho = random_density(24, 3);
        for (DissipatorKind kind : {DissipatorKind::QuantumOptical, DissipatorKind::CaldeiraLeggett}) {
            const Matrix dense = rhs_reference(rho, p, s, kind);
            Matrix banded;
            Liouvillian(p, s, kind).apply(rho, banded);
            CHECK(max_abs(banded - dense) <= 1e-12 * max_abs(dense));
        }
    }

    TEST_CASE("generators match an independent vectorized construction") {
        const int n = 8;
        const PhysicalParams p = busy_params();
        const SpaceDescriptor s = build_space(n, p.mass, p.omega, p.units);
        const oracle::M h = oracle::hamiltonian(n, 1.0, p.omega, p.epsilon, p.lambda, s.delta_x);
        const oracle::M a = oracle::kron(oracle::eye(2), oracle::lower(n));
        const double nbar = 1.0 / std::expm1(p.omega / p.theta);
        const oracle::M qo = oracle::liouvillian(
            h, {std::sqrt(2.0 * p.gamma * (nbar + 1.0)) * a, std::sqrt(2.0 * p.gamma * nbar) * a.adjoint()}, 1.0);
        const oracle::M x = s.delta_x * (a + a.adjoint());
        const oracle::M pm = Complex(0.0, s.delta_p) * (a.adjoint() - a);
        const double diff = 2.0 * p.mass * p.gamma * p.omega * (nbar + 0.5);
        const oracle::M cl = oracle::caldeira_leggett(h, x, pm, p.gamma, diff, 1.0);

        const Matrix rho = random_density(2 * n, 8);
        const Matrix ref_qo = oracle::unvec(qo * oracle::vec(rho), 2 * n);
        const Matrix ref_cl = oracle::unvec(cl * oracle::vec(rho), 2 * n);
        Matrix out;
        Liouvillian(p, s, DissipatorKind::QuantumOptical).apply(rho, out);
        CHECK(max_abs(out - ref_qo) <= 1e-12 * max_abs(ref_qo));
        Liouvillian(p, s, DissipatorKind::CaldeiraLeggett).apply(rho, out);
        CHECK(max_abs(out - ref_cl) <= 1e-12 * max_abs(ref_cl));
    }

    TEST_CASE("Hamiltonian") {
        PhysicalParams p;
        p.omega = 1.3;
        const SpaceDescriptor s = build_space(20, p.mass, p.omega, p.units);
        const CompositeOperator h0 = build_hamiltonian(p, s);
        CHECK(h0.hermitian());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h0.matrix());
        for (int k = 0; k < 19; ++k) {
            CHECK(std::abs(es.eigenvalues()(2 * k) - p.omega * (k + 0.5)) < 1e-8);
            CHECK(std::abs(es.eigenvalues()(2 * k + 1) - p.omega * (k + 0.5)) < 1e-8);
        }

        PhysicalParams pl;
        pl.omega = 50.0;
        pl.lambda = 1.0;
        Eigen::SelfAdjointEigenSolver<Matrix> el(build_hamiltonian(pl, build_space(6, 1.0, 50.0)).matrix());
        CHECK(el.eigenvalues()(1) - el.eigenvalues()(0) == doctest::Approx(2.0).epsilon(1e-12));

        PhysicalParams pe;
        pe.mass = 1.5;
        pe.omega = 0.9;
        pe.epsilon = 0.7;
        const SpaceDescriptor se = build_space(60, pe.mass, pe.omega, pe.units);
        const double expect = 0.5 * pe.omega - pe.epsilon * pe.epsilon / (2.0 * pe.mass * pe.omega * pe.omega);
        for (int q = 0; q < 2; ++q) {
            Eigen::SelfAdjointEigenSolver<Matrix> eb(branch_hamiltonian(q, pe, se));
            CHECK(std::abs(eb.eigenvalues()(0) - expect) < 1e-6);
        }
        const Matrix ref = oracle::hamiltonian(60, 1.0, pe.omega, pe.epsilon, 0.0, se.delta_x);
        CHECK(max_abs(build_hamiltonian(pe, se).matrix() - ref) < 1e-13);
    }

    TEST_CASE("generator structure") {
        const int n = 14;
        const PhysicalParams p = busy_params();
        const SpaceDescriptor s = build_space(n, p.mass, p.omega, p.units);
        const Matrix rho = random_density(2 * n, 21);
        const Matrix sz = embed(pauli::sigma_z(), Matrix::Identity(n, n)).matrix();
        for (DissipatorKind kind : {DissipatorKind::QuantumOptical, DissipatorKind::CaldeiraLeggett}) {
            IntegratorConfig c;
            c.dissipator = kind;
            const Matrix r = master_equation_rhs(CompositeDensity(rho), p, s, c);
            CHECK(std::abs(r.trace()) < 1e-10 * r.norm());
            CHECK(std::abs((sz * r).trace()) < 1e-10);
            c.kernel = KernelKind::DenseReference;
            CHECK(max_abs(master_equation_rhs(CompositeDensity(rho), p, s, c) - r) <= 1e-12 * max_abs(r));
        }

        PhysicalParams u = p;
        u.gamma = 0.0;
        const Matrix h = build_hamiltonian(u, s).matrix();
        const Matrix comm = Complex(0.0, -1.0) * (h * rho - rho * h);
        const Matrix r0 = master_equation_rhs(CompositeDensity(rho), u, s, IntegratorConfig{});
        CHECK(max_abs(r0 - comm) < 1e-13);
        CHECK(std::abs(r0.trace()) < 1e-13);
    }

    TEST_CASE("thermal state is stationary") {
        PhysicalParams p;
        p.gamma = 0.05;
        p.theta = temperature_for_occupation(0.7, 1.0, p.units);
        const SpaceDescriptor s = build_space(48, 1.0, 1.0);
        const CompositeDensity rho = prepare_protocol_input(ThermalSpec{0.7}, s);
        const Matrix r = master_equation_rhs(rho, p, s, IntegratorConfig{});
        CHECK(r.norm() < 1e-8 * rho.matrix().norm());
    }

    TEST_CASE("mismatched space is rejected") {
        const PhysicalParams p = busy_params();
        const SpaceDescriptor wrong = build_space(6, 1.0, 1.0);
        CHECK_THROWS_AS(Liouvillian(p, wrong, DissipatorKind::QuantumOptical), DomainError);
        CHECK_THROWS_AS(rhs_reference(Matrix::Identity(12, 12), p, wrong, DissipatorKind::QuantumOptical),
                        DomainError);
        const SpaceDescriptor s = build_space(6, p.mass, p.omega, p.units);
        Matrix out;
        CHECK_THROWS_AS(Liouvillian(p, s, DissipatorKind::QuantumOptical).apply(Matrix::Identity(10, 10), out),
                        DomainError);
        CHECK_THROWS_AS(master_equation_rhs(CompositeDensity(Matrix::Identity(10, 10)), p, s, IntegratorConfig{}),
                        DomainError);
    }
}
