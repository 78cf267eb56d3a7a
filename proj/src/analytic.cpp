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

#include "cohprobe/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cohprobe/errors.hpp"
#include "cohprobe/states.hpp"

namespace cohprobe {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw DomainError(std::string(field) + " " + what);
}
}  // namespace

void PhysicalParams::validate() const {
    require(std::isfinite(mass) && mass > 0.0, "m", "must be positive");
    require(std::isfinite(omega) && omega > 0.0, "omega", "must be positive");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be non-negative");
    require(std::isfinite(theta) && theta >= 0.0, "theta", "must be non-negative");
    require(std::isfinite(epsilon), "epsilon", "must be finite");
    require(std::isfinite(lambda), "lambda", "must be finite");
    if (omega_cut) require(std::isfinite(*omega_cut) && *omega_cut > 0.0, "omega_cut", "must be positive");
    require(units.hbar > 0.0, "hbar", "must be positive");
    require(units.k_B > 0.0, "k_B", "must be positive");
}

double PhysicalParams::period() const { return 2.0 * kPi / omega; }

double thermal_occupation(double omega, double theta, const UnitSystem& units) {
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    if (!(theta >= 0.0)) throw DomainError("theta must be non-negative");
    if (theta == 0.0) return 0.0;
    const double x = units.hbar * omega / (units.k_B * theta);
    return 1.0 / std::expm1(x);  // expm1 overflows to inf for huge x, giving 0
}

double temperature_for_occupation(double nbar, double omega, const UnitSystem& units) {
    if (!(nbar >= 0.0)) throw DomainError("nbar must be non-negative");
    if (nbar == 0.0) return 0.0;
    return units.hbar * omega / (units.k_B * std::log1p(1.0 / nbar));
}

double diffusion_coefficient(const PhysicalParams& p) {
    const double nbar = thermal_occupation(p);
    return 2.0 * p.mass * p.gamma * p.units.hbar * p.omega * (nbar + 0.5);
}

double decoherence_time(double diffusion, double separation, double hbar) {
    if (!(diffusion > 0.0)) throw DomainError("decoherence_time: D must be positive");
    if (separation == 0.0) throw DomainError("decoherence_time: separation must be non-zero");
    return hbar * hbar / (diffusion * separation * separation);
}

double zero_temp_decoherence_time(double gamma, double delta_alpha) {
    if (!(gamma > 0.0)) throw DomainError("zero_temp_decoherence_time: gamma must be positive");
    if (delta_alpha == 0.0) throw DomainError("zero_temp_decoherence_time: delta_alpha must be non-zero");
    return 1.0 / (2.0 * gamma * delta_alpha * delta_alpha);
}

double branch_separation(const PhysicalParams& p) { return 2.0 * p.epsilon / (p.mass * p.omega * p.omega); }

double momentum_shift(const PhysicalParams& p) {
    return diffusion_coefficient(p) * branch_separation(p) / (2.0 * p.units.hbar * p.omega);
}

BranchAmplitudes branch_amplitudes(Complex alpha, const PhysicalParams& p) {
    const SpaceDescriptor s = build_space(2, p.mass, p.omega, p.units);
    const double sep = branch_separation(p) / (2.0 * s.delta_x);
    const Complex shift(0.0, momentum_shift(p) / (2.0 * s.delta_p));
    BranchAmplitudes b;
    b.alpha0 = -alpha + sep;
    b.alpha1 = -alpha - sep;
    b.alpha0p = b.alpha0 + shift;
    b.alpha1p = b.alpha1 + shift;
    return b;
}

DimensionlessDesign design_summary(const PhysicalParams& p) {
    p.validate();
    const SpaceDescriptor s = build_space(2, p.mass, p.omega, p.units);
    const double hbar = p.units.hbar;
    const double diffusion = diffusion_coefficient(p);
    const double dx = branch_separation(p);

    DimensionlessDesign d;
    d.chi = p.epsilon * s.delta_x / (hbar * p.omega);
    d.quality = p.gamma > 0.0 ? p.omega / p.gamma : kInf;
    d.nbar = thermal_occupation(p);
    d.dx_over_2dx = dx / (2.0 * s.delta_x);
    d.dp_over_2dp = momentum_shift(p) / (2.0 * s.delta_p);
    d.d01 = diffusion * dx * dx / (hbar * hbar) * (0.5 * p.period());
    d.phi01 = -4.0 * kPi * d.d01;

    const double chi_nbar_over_q = d.chi * d.nbar / d.quality;
    d.estimates.separation = d.chi != 0.0 ? d.dx_over_2dx / d.chi : kInf;
    d.estimates.momentum_shift = chi_nbar_over_q != 0.0 ? d.dp_over_2dp / chi_nbar_over_q : kInf;
    d.estimates.exponent = chi_nbar_over_q != 0.0 ? d.d01 / (d.chi * chi_nbar_over_q) : kInf;
    return d;
}

CompositeDensity joint_state_from_branches(const BranchAmplitudes& b, double d01, double phi01,
                                           const SpaceDescriptor& space) {
    const Vector v0 = coherent_state({b.alpha0}, space);
    const Vector v1 = coherent_state({b.alpha1}, space);
    const Vector v0p = coherent_state({b.alpha0p}, space);
    const Vector v1p = coherent_state({b.alpha1p}, space);
    const int n = space.fock_dim;
    const Complex off = 0.5 * std::exp(-d01) * std::exp(Complex(0.0, -phi01));

    Matrix rho(2 * n, 2 * n);
    rho.block(0, 0, n, n) = 0.5 * v0 * v0.adjoint();
    rho.block(n, n, n, n) = 0.5 * v1 * v1.adjoint();
    rho.block(0, n, n, n) = off * v0p * v1p.adjoint();
    rho.block(n, 0, n, n) = std::conj(off) * v1p * v0p.adjoint();
    return CompositeDensity(std::move(rho));
}

CompositeDensity analytic_joint_state(ProtocolTime t, Complex alpha, const PhysicalParams& p,
                                      const SpaceDescriptor& space) {
    const DimensionlessDesign d = design_summary(p);
    if (t == ProtocolTime::Half) {
        CompositeDensity rho = joint_state_from_branches(branch_amplitudes(alpha, p), d.d01, d.phi01, space);
        rho.set_time(0.5 * p.period());
        return rho;
    }
    const Vector psi = coherent_state({alpha}, space);
    const Matrix rho_a = psi * psi.adjoint();
    const int n = space.fock_dim;
    const double c = std::exp(-2.0 * d.d01);
    Matrix rho(2 * n, 2 * n);
    rho.block(0, 0, n, n) = 0.5 * rho_a;
    rho.block(n, n, n, n) = 0.5 * rho_a;
    rho.block(0, n, n, n) = 0.5 * c * rho_a;
    rho.block(n, 0, n, n) = 0.5 * c * rho_a;
    return CompositeDensity(std::move(rho), p.period());
}

bool FeasibilityReport::all_pass() const {
    return momentum_shift.pass && separation.pass && coherence.pass && underdamped.pass &&
           (!markov.evaluated || markov.pass);
}

FeasibilityReport feasibility(const DimensionlessDesign& d, const PhysicalParams& p,
                              const FeasibilityThresholds& th) {
    FeasibilityReport r;

    const double chi_nbar = d.chi * d.nbar;
    r.momentum_shift.ratio = chi_nbar != 0.0 ? (d.quality * d.quality) / (chi_nbar * chi_nbar) : kInf;
    r.momentum_shift.pass = r.momentum_shift.ratio >= th.much_greater;

    r.separation.ratio = d.chi;
    r.separation.pass = std::abs(d.chi) >= th.min_chi;

    const double chi2_nbar = d.chi * d.chi * d.nbar;
    r.coherence.ratio = chi2_nbar != 0.0 ? d.quality / chi2_nbar : kInf;
    r.coherence.pass = r.coherence.ratio >= 1.0 / th.order_factor && r.coherence.ratio <= th.order_factor;

    if (p.omega_cut) {
        r.markov.ratio = p.units.k_B * p.theta / (p.units.hbar * *p.omega_cut);
        r.markov.pass = r.markov.ratio <= th.much_less;
    } else {
        r.markov.evaluated = false;
        r.markov.ratio = std::numeric_limits<double>::quiet_NaN();
    }

    r.underdamped.ratio = p.gamma / p.omega;
    r.underdamped.pass = r.underdamped.ratio <= th.underdamped;
    return r;
}

double flux_quantum(FluxQuantumConvention c) {
    const double h = c == FluxQuantumConvention::PlanckOver2e ? si::planck : si::hbar;
    return h / (2.0 * si::elementary_charge);
}

PhysicalParams flux_lc_realization(const FluxLcInputs& in) {
    require(in.inductance > 0.0, "L", "must be positive");
    require(in.capacitance > 0.0, "C", "must be positive");
    require(in.resistance > 0.0, "R", "must be positive");
    require(in.qubit_inductance > 0.0, "Lambda", "must be positive");
    require(in.flux_linkage > 0.0 && in.flux_linkage <= 1.0, "mu", "must lie in (0, 1]");
    require(in.theta > 0.0, "theta", "must be positive");

    PhysicalParams p;
    p.units = UnitSystem::si();
    p.mass = in.capacitance;
    p.omega = 1.0 / std::sqrt(in.inductance * in.capacitance);
    p.gamma = in.resistance / (2.0 * in.inductance);
    p.theta = in.theta;
    p.epsilon = in.flux_linkage * flux_quantum(in.convention) / in.qubit_inductance;
    return p;
}

PhysicalParams ion_trap_realization(const IonTrapInputs& in) {
    require(in.ion_count >= 1, "N", "must be >= 1");
    require(in.omega > 0.0, "omega", "must be positive");
    require(in.rabi > 0.0, "g", "must be positive");
    require(in.lamb_dicke > 0.0, "eta0", "must be positive");
    require(in.gamma > 0.0, "gamma", "must be positive");
    require(in.theta > 0.0, "theta", "must be positive");
    require(in.ion_mass > 0.0, "ion_mass", "must be positive");

    PhysicalParams p;
    p.units = UnitSystem::si();
    p.mass = in.ion_count * in.ion_mass;
    p.omega = in.omega;
    p.gamma = in.gamma;
    p.theta = in.theta;
    const SpaceDescriptor s = build_space(2, p.mass, p.omega, p.units);
    p.epsilon = p.units.hbar * in.rabi * in.lamb_dicke / (std::sqrt(static_cast<double>(in.ion_count)) * s.delta_x);
    return p;
}

double epsilon_for_chi(double chi, const PhysicalParams& p) {
    const SpaceDescriptor s = build_space(2, p.mass, p.omega, p.units);
    return chi * p.units.hbar * p.omega / s.delta_x;
}

double gamma_for_d01(double d01, const PhysicalParams& p) {
    // D01 is linear in gamma at fixed everything else.
    PhysicalParams unit = p;
    unit.gamma = 1.0;
    const double per_gamma = design_summary(unit).d01;
    if (!(per_gamma > 0.0)) throw DomainError("gamma_for_d01: coupling must be non-zero");
    return d01 / per_gamma;
}

PhysicalParams natural_units_reference() {
    PhysicalParams p;
    p.units = UnitSystem::natural();
    p.mass = 1.0;
    p.omega = 1.0;
    p.theta = temperature_for_occupation(0.5, p.omega, p.units);
    p.epsilon = epsilon_for_chi(1.0, p);
    p.gamma = gamma_for_d01(0.5, p);
    return p;
}

std::optional<Preset> preset_from_name(std::string_view name) {
    if (name == "flux-lc") return Preset::FluxLc;
    if (name == "ion-trap") return Preset::IonTrap;
    if (name == "natural-units-reference") return Preset::NaturalUnitsReference;
    return std::nullopt;
}

std::string_view preset_name(Preset p) {
    switch (p) {
        case Preset::FluxLc: return "flux-lc";
        case Preset::IonTrap: return "ion-trap";
        case Preset::NaturalUnitsReference: return "natural-units-reference";
    }
    return "";
}

}  // namespace cohprobe
