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

#include "cohprobe/errors.hpp"
#include "cohprobe/protocol.hpp"
#include "oracles.hpp"

using namespace cohprobe;

namespace {

PhysicalParams reference_with(double chi, double nbar, double d01) {
    PhysicalParams p;
    p.theta = temperature_for_occupation(nbar, 1.0, p.units);
    p.epsilon = epsilon_for_chi(chi, p);
    p.gamma = d01 > 0.0 ? gamma_for_d01(d01, p) : 0.0;
    return p;
}

bool same(const ProtocolResult& a, const ProtocolResult& b) {
    return a.c_half == b.c_half && a.c_full == b.c_full && a.d_eff == b.d_eff &&
           a.revival_fidelity == b.revival_fidelity && a.center0 == b.center0 && a.center1 == b.center1;
}

}  // namespace

TEST_SUITE("protocol") {
    TEST_CASE("unitary case revives") {
        const PhysicalParams p = reference_with(1.0, 0.5, 0.0);
        const SpaceDescriptor s = build_space(32, 1.0, 1.0);
        const ProtocolResult r = run_single({Complex(0.5, -0.3)}, p, s, IntegratorConfig{});
        CHECK(r.c_full >= 1.0 - 1e-5);
        CHECK(r.d_eff < 1e-5);
        CHECK(r.d_eff >= -1e-6);
        CHECK(r.revival_fidelity >= 1.0 - 1e-5);
        CHECK(r.d01_analytic == 0.0);
        CHECK(r.branch_separation == doctest::Approx(2.0));
    }

    TEST_CASE("no coupling leaves the qubit untouched") {
        PhysicalParams p = reference_with(1.0, 0.5, 0.5);
        p.epsilon = 0.0;
        const ProtocolResult r = run_single({0.3}, p, build_space(24, 1.0, 1.0), IntegratorConfig{});
        CHECK(std::abs(r.c_full - 1.0) < 1e-6);
        CHECK(std::abs(r.c_half - 1.0) < 1e-6);
    }

    TEST_CASE("desk-scale reference exponent") {
        const PhysicalParams p = natural_units_reference();
        const ProtocolResult r = run_single({0.0}, p, build_space(40, 1.0, 1.0), IntegratorConfig{});
        CHECK(r.d01_analytic == doctest::Approx(0.5).epsilon(1e-12));
        MESSAGE("d_eff = " << r.d_eff << " vs D01 = 0.5");
        CHECK(std::abs(r.d_eff - 0.5) / 0.5 <= 0.15);
        CHECK(r.c_full >= 0.0);
        CHECK(r.c_full <= 1.0);
        // step-one and step-two exponents agree once the branch overlap is removed
        CHECK(std::abs(r.d_eff_half - r.d_eff) <= 0.2 * r.d_eff);
        CHECK(r.half_overlap == doctest::Approx(std::exp(-0.5 * std::norm(r.center0 - r.center1))));
    }

    TEST_CASE("purity of repeated runs") {
        const PhysicalParams p = natural_units_reference();
        const SpaceDescriptor s = build_space(24, 1.0, 1.0);
        IntegratorConfig c;
        c.steps_per_period = 400;
        CHECK(same(run_single({Complex(0.2, 0.1)}, p, s, c), run_single({Complex(0.2, 0.1)}, p, s, c)));
    }

    TEST_CASE("infeasible truncation is rejected before integrating") {
        const PhysicalParams p = reference_with(3.0, 0.5, 0.5);
        const SpaceDescriptor s = build_space(24, 1.0, 1.0);
        CHECK(branch_excursion(0.0, design_summary(p)) == doctest::Approx(6.0 + design_summary(p).dp_over_2dp));
        CHECK_THROWS_AS(run_single({0.0}, p, s, IntegratorConfig{}), InfeasibleError);
        IntegratorConfig bad;
        bad.steps_per_period = 10;
        CHECK_THROWS_AS(run_single({0.0}, natural_units_reference(), s, bad), DomainError);
    }

    TEST_CASE("revival fidelity approaches one as damping vanishes") {
        PhysicalParams p = reference_with(1.0, 0.5, 0.0);
        const SpaceDescriptor s = build_space(28, 1.0, 1.0);
        double prev = 0.0;
        for (double g : {1e-1, 1e-2, 1e-3}) {
            p.gamma = g;
            const double f = run_single({0.5}, p, s, IntegratorConfig{}).revival_fidelity;
            CHECK(f > prev);
            prev = f;
        }
        CHECK(prev > 0.99);
    }

    TEST_CASE("thermal averaging") {
        PhysicalParams zero = reference_with(1.0, 0.0, 0.0);
        zero.theta = 0.0;
        zero.gamma = gamma_for_d01(0.3, zero);
        const SpaceDescriptor s = build_space(32, 1.0, 1.0);
        IntegratorConfig c;
        c.steps_per_period = 500;
        const ThermalProtocolResult t0 = run_thermal(zero, s, c, 3, 1);
        const ProtocolResult single = run_single({0.0}, zero, s, c);
        CHECK(t0.mean_c_full == single.c_full);
        CHECK(t0.mean_d_eff == single.d_eff);
        CHECK(t0.sd_d_eff == 0.0);
        CHECK(t0.rng == "mt19937_64");

        const PhysicalParams p = natural_units_reference();
        const ThermalProtocolResult a = run_thermal(p, s, c, 5, 77);
        const ThermalProtocolResult b = run_thermal(p, s, c, 5, 77);
        REQUIRE(a.samples.size() == 5);
        for (int i = 0; i < 5; ++i) CHECK(same(a.samples[i], b.samples[i]));
        CHECK(a.mean_d_eff == b.mean_d_eff);
        CHECK(run_thermal(p, s, c, 5, 78).samples[0].alpha != a.samples[0].alpha);

        // draws follow the seeded sampler in order
        Rng rng(77);
        for (int i = 0; i < 5; ++i) CHECK(a.samples[i].alpha == sample_coherent_label({a.nbar}, rng).alpha);

        double m = 0.0, ss = 0.0;
        for (const auto& r : a.samples) m += r.d_eff;
        m /= 5.0;
        for (const auto& r : a.samples) ss += (r.d_eff - m) * (r.d_eff - m);
        CHECK(a.mean_d_eff == doctest::Approx(m).epsilon(1e-14));
        CHECK(a.sd_d_eff == doctest::Approx(std::sqrt(ss / 4.0)).epsilon(1e-12));
        CHECK(a.se_d_eff == doctest::Approx(a.sd_d_eff / std::sqrt(5.0)).epsilon(1e-12));
        CHECK(a.cv_d_eff() < 0.1);
    }

    TEST_CASE("thermal rejection guard") {
        const PhysicalParams p = reference_with(1.0, 3.0, 0.5);
        CHECK_THROWS_AS(run_thermal(p, build_space(14, 1.0, 1.0), IntegratorConfig{}, 20, 3), InfeasibleError);
        CHECK_THROWS_AS(run_thermal(p, build_space(14, 1.0, 1.0), IntegratorConfig{}, 0, 3), DomainError);
    }

    TEST_CASE("axis substitution") {
        const PhysicalParams p = reference_with(1.0, 0.5, 0.5);
        const PhysicalParams m2 = with_axis_value(p, SweepAxis::Mass, 2.0);
        CHECK(m2.epsilon == 2.0 * p.epsilon);
        CHECK(branch_separation(m2) == branch_separation(p));
        CHECK(with_axis_value(p, SweepAxis::Theta, 3.0).theta == 3.0);
        CHECK(with_axis_value(p, SweepAxis::Omega, 3.0).omega == 3.0);
        CHECK(with_axis_value(p, SweepAxis::Gamma, 0.0).gamma == 0.0);
        CHECK(with_axis_value(p, SweepAxis::Epsilon, 0.1).epsilon == 0.1);
        CHECK_THROWS_AS(with_axis_value(p, SweepAxis::Theta, -1.0), DomainError);
        for (auto a : {SweepAxis::Theta, SweepAxis::Mass, SweepAxis::Epsilon, SweepAxis::Gamma, SweepAxis::Omega}) {
            CHECK(sweep_axis_from_name(to_string(a)) == a);
        }
        for (auto m : {SweepMode::Analytic, SweepMode::Numeric, SweepMode::Both}) CHECK(sweep_mode_from_name(to_string(m)) == m);
    }

    TEST_CASE("analytic sweeps") {
        PhysicalParams p = reference_with(1.0, 0.5, 0.5);
        const SweepTable t = sweep(p, SweepAxis::Theta, {10.0, 20.0, 40.0}, SweepMode::Analytic, 16, {});
        REQUIRE(t.rows.size() == 3);
        CHECK(t.rows[1].d01_analytic / t.rows[0].d01_analytic == doctest::Approx(2.0).epsilon(0.01));
        CHECK(t.rows[2].d01_analytic / t.rows[0].d01_analytic == doctest::Approx(4.0).epsilon(0.01));
        CHECK(std::isnan(t.rows[0].d_eff_numeric));
        CHECK(std::isnan(t.rows[0].c_full));

        const SweepTable m = sweep(p, SweepAxis::Mass, {1.0, 2.0}, SweepMode::Analytic, 16, {});
        CHECK(m.rows[1].d01_analytic / m.rows[0].d01_analytic == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(m.rows[1].epsilon == 2.0 * m.rows[0].epsilon);

        const SweepTable g = sweep(p, SweepAxis::Gamma, {1e-1, 1e-2, 1e-3, 1e-4, 0.0}, SweepMode::Analytic, 16, {});
        for (std::size_t i = 1; i < g.rows.size(); ++i) CHECK(g.rows[i].d01_analytic < g.rows[i - 1].d01_analytic);
        CHECK(g.rows.back().d01_analytic == 0.0);

        CHECK_THROWS_AS(sweep(p, SweepAxis::Theta, {}, SweepMode::Analytic, 16, {}), DomainError);
    }

    TEST_CASE("sweep rows carry their errors") {
        const PhysicalParams p = reference_with(1.0, 0.5, 0.5);
        IntegratorConfig c;
        c.steps_per_period = 300;
        const SweepTable t = sweep(p, SweepAxis::Epsilon, {epsilon_for_chi(0.5, p), 0.0, epsilon_for_chi(4.0, p)},
                                   SweepMode::Both, 24, c);
        REQUIRE(t.rows.size() == 3);
        CHECK(t.rows[0].error.empty());
        CHECK(std::isfinite(t.rows[0].d_eff_numeric));
        CHECK(t.rows[0].c_full > 0.0);
        CHECK(t.rows[1].error.empty());
        CHECK(std::abs(t.rows[1].c_full - 1.0) < 1e-6);
        CHECK(t.rows[2].error.rfind("infeasible", 0) == 0);
        CHECK(std::isnan(t.rows[2].d_eff_numeric));
        CHECK(t.rows[2].d01_analytic > 0.0);

        const SweepTable bad = sweep(p, SweepAxis::Omega, {1.0, -2.0}, SweepMode::Analytic, 24, c);
        CHECK(bad.rows[0].error.empty());
        CHECK(bad.rows[1].error.rfind("domain", 0) == 0);
    }
}
