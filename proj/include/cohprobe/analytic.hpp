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

#include <optional>
#include <string>
#include <string_view>

#include "cohprobe/hilbert.hpp"
#include "cohprobe/units.hpp"

namespace cohprobe {

/// Everything that defines a run physically. In the LC analogy `mass` is the
/// capacitance and positions are fluxes.
struct PhysicalParams {
    double mass = 1.0;
    double omega = 1.0;    // angular frequency
    double gamma = 0.0;    // relaxation rate
    double theta = 0.0;    // temperature
    double epsilon = 0.0;  // coupling, H_QA = epsilon x sigma_z
    double lambda = 0.0;   // qubit energy, H_Q = lambda sigma_z
    std::optional<double> omega_cut;
    UnitSystem units = UnitSystem::natural();

    /// Throws DomainError naming the first offending field.
    void validate() const;

    double period() const;
};

/// Bose-Einstein occupation [exp(hbar omega / k_B theta) - 1]^-1; 0 at theta = 0.
double thermal_occupation(double omega, double theta, const UnitSystem& units);
inline double thermal_occupation(const PhysicalParams& p) { return thermal_occupation(p.omega, p.theta, p.units); }

/// D = 2 m gamma hbar omega (nbar + 1/2).
double diffusion_coefficient(const PhysicalParams& p);

/// tau_D = hbar^2 / (D dx^2).
double decoherence_time(double diffusion, double separation, double hbar);

/// tau_D = 1 / (2 gamma |d_alpha|^2), the zero-temperature form.
double zero_temp_decoherence_time(double gamma, double delta_alpha);

/// Half-separation parameter Dx = 2 epsilon / (m omega^2).
double branch_separation(const PhysicalParams& p);

/// Momentum shift Dp = D Dx / (2 hbar omega).
double momentum_shift(const PhysicalParams& p);

struct BranchAmplitudes {
    Complex alpha0;
    Complex alpha1;
    Complex alpha0p;
    Complex alpha1p;
};

/// alpha_j = -alpha + (-1)^j Dx/2dx, alpha_j' = alpha_j + i Dp/2dp.
BranchAmplitudes branch_amplitudes(Complex alpha, const PhysicalParams& p);

/// Exact values next to the order-of-magnitude estimates chi, chi nbar/Q and
/// chi^2 nbar/Q; each ratio is exact / estimate.
struct EstimateRatios {
    double separation;
    double momentum_shift;
    double exponent;
};

struct DimensionlessDesign {
    double chi = 0.0;
    double quality = 0.0;  // +inf when gamma == 0
    double nbar = 0.0;
    double dx_over_2dx = 0.0;
    double dp_over_2dp = 0.0;
    double d01 = 0.0;
    double phi01 = 0.0;
    EstimateRatios estimates{};
};

DimensionlessDesign design_summary(const PhysicalParams& p);

enum class ProtocolTime { Half, Full };

/// Two-branch state
///   1/2 (|0><0| |a0><a0| + |1><1| |a1><a1|)
///   + e^{-d01}/2 (e^{-i phi} |0><1| |a0'><a1'| + h.c.).
CompositeDensity joint_state_from_branches(const BranchAmplitudes& b, double d01, double phi01,
                                           const SpaceDescriptor& space);

/// Closed-form composite state at T/2 or at T for an initial coherent state.
CompositeDensity analytic_joint_state(ProtocolTime t, Complex alpha, const PhysicalParams& p,
                                      const SpaceDescriptor& space);

struct Condition {
    double ratio = 0.0;
    bool pass = false;
    bool evaluated = true;
};

/// "much greater" means ratio >= much_greater; "of order" means within a
/// factor `order_factor`; "much less" means ratio <= much_less.
struct FeasibilityThresholds {
    double much_greater = 10.0;
    double order_factor = 10.0;
    double much_less = 0.1;
    double underdamped = 0.01;
    double min_chi = 1.0;
};

struct FeasibilityReport {
    Condition momentum_shift;  // Q^2 / (chi nbar)^2 >= much_greater
    Condition separation;      // chi >= min_chi
    Condition coherence;       // Q / (chi^2 nbar) within order_factor of 1
    Condition markov;          // k_B theta / (hbar omega_cut) <= much_less
    Condition underdamped;     // gamma / omega <= underdamped

    bool all_pass() const;
};

FeasibilityReport feasibility(const DimensionlessDesign& design, const PhysicalParams& p,
                              const FeasibilityThresholds& thresholds = {});

// ---- experimental realizations -------------------------------------------

enum class FluxQuantumConvention {
    PlanckOver2e,         // h / 2e, 2.07e-15 Wb
    ReducedPlanckOver2e,  // hbar / 2e
};

double flux_quantum(FluxQuantumConvention c);

/// Flux qubit coupled to an LC tank, SI units.
struct FluxLcInputs {
    double inductance = 100e-6;
    double capacitance = 100e-12;
    double resistance = 1.0;
    double qubit_inductance = 100e-12;
    double flux_linkage = 1e-6;
    double theta = 10e-3;
    FluxQuantumConvention convention = FluxQuantumConvention::PlanckOver2e;
};

/// m <- C, omega <- 1/sqrt(LC), gamma <- R/2L, epsilon <- mu Phi0 / Lambda.
PhysicalParams flux_lc_realization(const FluxLcInputs& in);

/// Single-ion qubit coupled to the collective motion of N ions, SI units.
struct IonTrapInputs {
    int ion_count = 100;
    double omega = 1e6;
    double rabi = 1e8 * 3.1622776601683795;   // vacuum Rabi frequency g
    double lamb_dicke = 0.31622776601683794;  // eta_0
    double gamma = 1e3;
    double theta = 1e-4;
    double ion_mass = 9.0121831 * si::atomic_mass;  // 9Be+
};

/// epsilon <- hbar g eta0 / (sqrt(N) dx), so chi = g eta0 / (sqrt(N) omega).
PhysicalParams ion_trap_realization(const IonTrapInputs& in);

/// Natural units m = omega = hbar = k_B = 1, chi = 1, nbar = 0.5, D01 = 0.5.
PhysicalParams natural_units_reference();

/// Inverse of thermal_occupation: the temperature giving occupation nbar.
double temperature_for_occupation(double nbar, double omega, const UnitSystem& units);

/// Coupling that yields a target chi for the given oscillator.
double epsilon_for_chi(double chi, const PhysicalParams& p);

/// Relaxation rate that yields a target D01 with everything else fixed.
double gamma_for_d01(double d01, const PhysicalParams& p);

enum class Preset { FluxLc, IonTrap, NaturalUnitsReference };

std::optional<Preset> preset_from_name(std::string_view name);
std::string_view preset_name(Preset p);

}  // namespace cohprobe
