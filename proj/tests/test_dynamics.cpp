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
#include "cohprobe/protocol.hpp"
#include "cohprobe/states.hpp"
#include "oracles.hpp"

using namespace cohprobe;

namespace {

double pure_fidelity(const Matrix& psi_rho, const Matrix& rho) {
    // psi_rho = |psi><psi| of a pure reference
    return (psi_rho * rho).trace().real();
}

PhysicalParams reference_with(double chi, double nbar, double gamma) {
    PhysicalParams p;
    p.theta = temperature_for_occupation(nbar, 1.0, p.units);
    p.epsilon = epsilon_for_chi(chi, p);
    p.gamma = gamma;
    return p;
}

}  // namespace

TEST_SUITE("dynamics") {
    TEST_CASE("free revolution returns the initial state") {
        const PhysicalParams p;  // eps = gamma = 0
        const SpaceDescriptor s = build_space(40, 1.0, 1.0);
        const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{Complex(1.2, -0.7)}, s);
        const Trajectory t = evolve(r0, p.period(), p, s, IntegratorConfig{});
        CHECK(t.final_state.time() == doctest::Approx(p.period()).epsilon(1e-15));
        CHECK(pure_fidelity(r0.matrix(), t.final_state.matrix()) >= 1.0 - 1e-6);
    }

    TEST_CASE("conditional displacement matches the exact unitary and closes at T") {
        const int n = 28;
        PhysicalParams p;
        p.omega = 1.0;
        p.lambda = 0.3;
        p.epsilon = epsilon_for_chi(0.8, p);
        const SpaceDescriptor s = build_space(n, p.mass, p.omega, p.units);
        const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{Complex(0.4, 0.2)}, s);
        const oracle::M h = oracle::hamiltonian(n, 1.0, p.omega, p.epsilon, p.lambda, s.delta_x);

        IntegratorConfig c;
        c.store_states = true;
        c.record_stride = 250;
        const Trajectory t = evolve(r0, p.period(), p, s, c);
        for (const auto& pt : t.points) {
            const Matrix ref = oracle::unitary_evolve(h, r0.matrix(), pt.sample.time, 1.0);
            CHECK(trace_distance(pt.state->matrix(), ref) < 1e-7);
        }
        const ObservableSeries obs = trajectory_observables(t);
        CHECK(obs.samples.back().coherence >= 1.0 - 1e-5);
        for (const auto& x : obs.samples) CHECK(std::abs(x.purity - 1.0) < 1e-6);
    }

    TEST_CASE("dissipative evolution matches the propagator exponential") {
        const int n = 8;
        for (DissipatorKind kind : {DissipatorKind::QuantumOptical, DissipatorKind::CaldeiraLeggett}) {
            PhysicalParams p = reference_with(0.3, 0.4, 0.05);
            p.lambda = 0.1;
            const SpaceDescriptor s = build_space(n, 1.0, 1.0);
            const oracle::M h = oracle::hamiltonian(n, 1.0, 1.0, p.epsilon, p.lambda, s.delta_x);
            const oracle::M a = oracle::kron(oracle::eye(2), oracle::lower(n));
            const double nbar = 0.4;
            oracle::M l;
            if (kind == DissipatorKind::QuantumOptical) {
                l = oracle::liouvillian(
                    h, {std::sqrt(2 * p.gamma * (nbar + 1)) * a, std::sqrt(2 * p.gamma * nbar) * a.adjoint()}, 1.0);
            } else {
                const oracle::M x = s.delta_x * (a + a.adjoint());
                const oracle::M pm = Complex(0.0, s.delta_p) * (a.adjoint() - a);
                l = oracle::caldeira_leggett(h, x, pm, p.gamma, 2 * p.gamma * (nbar + 0.5), 1.0);
            }
            const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{0.3}, s);
            IntegratorConfig c;
            c.dissipator = kind;
            c.leak_threshold = 0.5;  // tiny space; leakage is not the point here
            const Trajectory t = evolve(r0, 0.7 * p.period(), p, s, c);
            const Matrix ref = oracle::evolve_exact(l, r0.matrix(), 0.7 * p.period());
            CHECK((t.final_state.matrix() - ref).cwiseAbs().maxCoeff() < 1e-9);
        }
    }

    TEST_CASE("step halving convergence") {
        const PhysicalParams p = natural_units_reference();
        const SpaceDescriptor s = build_space(32, 1.0, 1.0);
        const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{0.0}, s);
        IntegratorConfig c1;
        c1.record_stride = 100;
        IntegratorConfig c2 = c1;
        c2.steps_per_period = 2 * c1.steps_per_period;
        c2.record_stride = 2 * c1.record_stride;
        const auto a = trajectory_observables(evolve(r0, p.period(), p, s, c1)).samples;
        const auto b = trajectory_observables(evolve(r0, p.period(), p, s, c2)).samples;
        REQUIRE(a.size() == b.size());
        // relative to the observable's magnitude, with unit scale for the ones that sit near zero
        auto close = [](double x, double y) { return std::abs(x - y) <= 1e-6 * std::max(std::abs(y), 1.0); };
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].time == doctest::Approx(b[i].time).epsilon(1e-14));
            CHECK(std::abs(a[i].coherence - b[i].coherence) <= 1e-6 * b[i].coherence + 1e-12);
            CHECK(close(a[i].x_mean, b[i].x_mean));
            CHECK(close(a[i].p_mean, b[i].p_mean));
            CHECK(close(a[i].purity, b[i].purity));
            CHECK(close(a[i].sigma_z, b[i].sigma_z));
        }
    }

    TEST_CASE("recording and conservation") {
        const PhysicalParams p = natural_units_reference();
        const SpaceDescriptor s = build_space(30, 1.0, 1.0);
        const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{Complex(0.5, 0.5)}, s);
        IntegratorConfig c;
        c.steps_per_period = 400;
        c.record_stride = 7;
        c.store_states = true;
        const Trajectory t = evolve(r0, 1.5 * p.period(), p, s, c);
        CHECK(t.steps == 600);
        CHECK(t.points.front().sample.time == 0.0);
        CHECK(t.points.size() == 600 / 7 + 2);
        for (std::size_t i = 1; i < t.points.size(); ++i) {
            CHECK(t.points[i].sample.time > t.points[i - 1].sample.time);
        }
        const ObservableSeries obs = trajectory_observables(t);
        CHECK(obs.samples.front().coherence == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(obs.samples.front().sigma_z) < 1e-15);
        CHECK(obs.sigma_z_drift() < 1e-8);
        for (const auto& pt : t.points) {
            const auto& x = pt.sample;
            CHECK(std::abs(x.trace_dev) < c.trace_tolerance * std::max(1.0, x.time / p.period()));
            CHECK(x.coherence <= 1.0 + 1e-6);
            CHECK(x.coherence >= 0.0);
            CHECK(min_eigenvalue(pt.state->matrix()) >= -1e-6);
        }
        Trajectory empty;
        CHECK_THROWS_AS(trajectory_observables(empty), DomainError);
    }

    TEST_CASE("observables agree with full-matrix expectations") {
        const PhysicalParams p = natural_units_reference();
        const SpaceDescriptor s = build_space(20, 1.0, 1.0);
        IntegratorConfig c;
        c.steps_per_period = 200;
        const Trajectory t = evolve(prepare_protocol_input(CoherentLabel{0.7}, s), 0.3, p, s, c);
        const CompositeDensity& r = t.final_state;
        const auto o = oscillator_operators(s);
        const ObservableSample x = observe(r, s);
        CHECK(std::abs(x.x_mean - expectation(embed(pauli::identity(), o.x), r).real()) < 1e-13);
        CHECK(std::abs(x.p_mean - expectation(embed(pauli::identity(), o.p), r).real()) < 1e-13);
        CHECK(std::abs(x.sigma_z - expectation(embed(pauli::sigma_z(), Matrix::Identity(20, 20)), r).real()) < 1e-13);
        CHECK(x.coherence == doctest::Approx(qubit_coherence(partial_trace_oscillator(r))).epsilon(1e-13));
        CHECK(x.top_fock_pop == doctest::Approx((r.block(0, 0) + r.block(1, 1))(19, 19).real()));
    }

    TEST_CASE("classical damped motion of the mean at eps = 0") {
        for (DissipatorKind kind : {DissipatorKind::QuantumOptical, DissipatorKind::CaldeiraLeggett}) {
            PhysicalParams p;
            p.gamma = 0.01;  // Q = 100
            p.theta = temperature_for_occupation(0.3, 1.0, p.units);
            const SpaceDescriptor s = build_space(36, 1.0, 1.0);
            const Complex alpha(2.0, 0.5);
            IntegratorConfig c;
            c.dissipator = kind;
            c.record_stride = 50;
            const auto obs = trajectory_observables(
                evolve(prepare_protocol_input(CoherentLabel{alpha}, s), 3.0 * p.period(), p, s, c));
            // d/dt (x, p) = G (x, p): QO damps both quadratures, CL damps momentum at twice the rate
            Eigen::Matrix2d g;
            if (kind == DissipatorKind::QuantumOptical) g << -p.gamma, 1.0, -1.0, -p.gamma;
            else g << 0.0, 1.0, -1.0, -2.0 * p.gamma;
            const Eigen::Vector2d v0(2.0 * s.delta_x * alpha.real(), 2.0 * s.delta_p * alpha.imag());
            const double amp = 2.0 * s.delta_x * std::abs(alpha);
            for (const auto& x : obs.samples) {
                const Eigen::Matrix2d e = (g * x.time).exp();
                const Eigen::Vector2d v = e * v0;
                CHECK(std::abs(x.x_mean - v(0)) < 0.01 * amp);
            }
        }
    }

    TEST_CASE("dissipator cross-check at zero temperature") {
        PhysicalParams p = reference_with(1.0, 0.0, 0.0);
        p.theta = 0.0;
        p.gamma = gamma_for_d01(0.2, p);
        const SpaceDescriptor s = build_space(32, 1.0, 1.0);
        IntegratorConfig c;
        const auto qo = run_single({0.0}, p, s, c);
        c.dissipator = DissipatorKind::CaldeiraLeggett;
        const auto cl = run_single({0.0}, p, s, c);
        const double rel = std::abs(cl.c_half - qo.c_half) / qo.c_half;
        MESSAGE("C(T/2) caldeira-leggett vs quantum-optical at nbar = 0: relative difference " << rel);
        CHECK(rel < 0.15);
    }

    TEST_CASE("half-period coherence against the decohered branch model") {
        // natural units, chi = 1, nbar = 0.5, Q = 50
        const PhysicalParams p = reference_with(1.0, 0.5, 1.0 / 50.0);
        const SpaceDescriptor s = build_space(40, 1.0, 1.0);
        const ProtocolResult r = run_single({0.0}, p, s, IntegratorConfig{});
        const DimensionlessDesign d = design_summary(p);
        const BranchAmplitudes b = branch_amplitudes(0.0, p);
        const double literal = std::exp(-d.d01) * std::exp(-0.5 * std::norm(b.alpha0p - b.alpha1p));
        // the branch centres are themselves damped, so their overlap is taken from the simulation
        const double modelled = std::exp(-d.d01) * r.half_overlap;
        MESSAGE("C(T/2) = " << r.c_half << ", undamped-branch closed form " << literal << " (relative "
                            << r.c_half / literal - 1.0 << "), with simulated branch overlap " << modelled);
        CHECK(std::abs(r.c_half - modelled) <= 0.10 * modelled);
        CHECK(std::abs(std::abs(r.center0 - r.center1) - 2.0 * d.dx_over_2dx) < 0.1 * 2.0 * d.dx_over_2dx);
    }

    TEST_CASE("integrator guards") {
        const PhysicalParams p = natural_units_reference();
        const SpaceDescriptor s = build_space(20, 1.0, 1.0);
        const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{0.0}, s);
        IntegratorConfig c;
        c.steps_per_period = 100;
        c.trace_tolerance = 1e-300;
        try {
            evolve(r0, 1.0, p, s, c);
            FAIL("expected IntegratorError");
        } catch (const IntegratorError& e) {
            CHECK(e.step() >= 1);
            CHECK(e.magnitude() > 0.0);
        }

        PhysicalParams wide = p;
        wide.epsilon = epsilon_for_chi(2.5, p);
        IntegratorConfig c2;
        c2.steps_per_period = 200;
        try {
            evolve(prepare_protocol_input(CoherentLabel{1.0}, build_space(14, 1.0, 1.0)), p.period(), wide,
                   build_space(14, 1.0, 1.0), c2);
            FAIL("expected TruncationError");
        } catch (const TruncationError& e) {
            CHECK(e.step() >= 1);
            CHECK(e.magnitude() > c2.leak_threshold);
        }

        CHECK_THROWS_AS(evolve(r0, 0.0, p, s, IntegratorConfig{}), DomainError);
        IntegratorConfig bad;
        bad.steps_per_period = 99;
        CHECK_THROWS_AS(evolve(r0, 1.0, p, s, bad), DomainError);
        bad = {};
        bad.record_stride = 0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
        bad = {};
        bad.leak_threshold = 0.0;
        CHECK_THROWS_AS(bad.validate(), DomainError);
    }

    TEST_CASE("dense reference kernel integrates identically") {
        const PhysicalParams p = natural_units_reference();
        const SpaceDescriptor s = build_space(10, 1.0, 1.0);
        const CompositeDensity r0 = prepare_protocol_input(CoherentLabel{0.2}, s);
        IntegratorConfig a, b;
        a.steps_per_period = b.steps_per_period = 200;
        a.leak_threshold = b.leak_threshold = 0.1;
        b.kernel = KernelKind::DenseReference;
        const Matrix ra = evolve(r0, 2.0, p, s, a).final_state.matrix();
        const Matrix rb = evolve(r0, 2.0, p, s, b).final_state.matrix();
        CHECK((ra - rb).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("name round trips") {
        for (auto k : {DissipatorKind::QuantumOptical, DissipatorKind::CaldeiraLeggett}) {
            CHECK(dissipator_from_name(to_string(k)) == k);
        }
        for (auto k : {KernelKind::Banded, KernelKind::DenseReference}) CHECK(kernel_from_name(to_string(k)) == k);
        CHECK_FALSE(dissipator_from_name("lindblad").has_value());
    }
}
