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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohprobe/analytic.hpp"
#include "cohprobe/dynamics.hpp"
#include "cohprobe/states.hpp"

namespace cohprobe {

struct ProtocolResult {
    Complex alpha;
    double c_half = 0.0;
    double c_full = 0.0;
    double d_eff = 0.0;  // -ln(c_full) / 2
    double d01_analytic = 0.0;
    double branch_separation = 0.0;  // Dx / 2 delta_x
    double revival_fidelity = 0.0;   // <alpha| rho_A(T) |alpha>

    // T/2 diagnostics: branch centers <a> of the two qubit branches, the
    // coherent overlap they imply, and the exponent left after removing it.
    Complex center0;
    Complex center1;
    double half_overlap = 0.0;
    double d_eff_half = 0.0;  // -ln(c_half / half_overlap)

    DimensionlessDesign design;
    FeasibilityReport regime;
};

/// Largest branch amplitude reached during the protocol, |alpha| + 2 chi + Dp/2dp.
double branch_excursion(Complex alpha, const DimensionlessDesign& d);

/// Prepare |+> |alpha>, evolve to T/2 and on to T, and read out the qubit.
/// Throws InfeasibleError before integrating when the branch excursion does
/// not fit the truncation guard.
ProtocolResult run_single(const CoherentLabel& alpha, const PhysicalParams& p, const SpaceDescriptor& space,
                          const IntegratorConfig& config);

struct ThermalProtocolResult {
    std::uint64_t seed = 0;
    std::string rng{kRngName};
    double nbar = 0.0;
    int rejected = 0;
    std::vector<ProtocolResult> samples;

    double mean_c_full = 0.0;
    double se_c_full = 0.0;
    double mean_d_eff = 0.0;
    double se_d_eff = 0.0;
    double sd_d_eff = 0.0;  // unbiased sample standard deviation

    double cv_d_eff() const { return sd_d_eff / mean_d_eff; }
};

/// Samples the thermal P-function at the bath temperature, runs run_single
/// per sample in parallel and aggregates in sample order. Samples whose
/// excursion breaks the truncation guard are redrawn; more than 10 %
/// rejections abort with InfeasibleError.
ThermalProtocolResult run_thermal(const PhysicalParams& p, const SpaceDescriptor& space, const IntegratorConfig& config,
                                  int n_samples, std::uint64_t seed);

enum class SweepAxis { Theta, Mass, Epsilon, Gamma, Omega };
enum class SweepMode { Analytic, Numeric, Both };

std::string_view to_string(SweepAxis a);
std::string_view to_string(SweepMode m);
std::optional<SweepAxis> sweep_axis_from_name(std::string_view name);
std::optional<SweepMode> sweep_mode_from_name(std::string_view name);

struct SweepRow {
    double axis_value = 0.0;
    double epsilon = 0.0;  // coupling actually used (differs from input on the m axis)
    double d01_analytic = 0.0;
    double d_eff_numeric = 0.0;  // NaN unless numerically evaluated
    double c_full = 0.0;         // NaN unless numerically evaluated
    FeasibilityReport feasibility;
    std::string error;  // empty on success
};

struct SweepTable {
    SweepAxis axis = SweepAxis::Theta;
    SweepMode mode = SweepMode::Analytic;
    std::vector<SweepRow> rows;
};

/// Parameters with one axis replaced. On the m axis epsilon is scaled with m
/// so that Dx = 2 epsilon / m omega^2 stays fixed.
PhysicalParams with_axis_value(const PhysicalParams& p, SweepAxis axis, double value);

/// One row per value; rows are evaluated in parallel and a failing row
/// records its error instead of aborting the sweep. Numeric rows run the
/// protocol from |alpha>; each row builds its own space for its oscillator.
SweepTable sweep(const PhysicalParams& p, SweepAxis axis, const std::vector<double>& values, SweepMode mode,
                 int fock_dim, const IntegratorConfig& config, Complex alpha = {});

}  // namespace cohprobe
