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
#include <string_view>
#include <vector>

#include "cohprobe/analytic.hpp"
#include "cohprobe/hilbert.hpp"
#include "cohprobe/liouvillian.hpp"

namespace cohprobe {

enum class KernelKind { Banded, DenseReference };

struct IntegratorConfig {
    int steps_per_period = 2000;
    DissipatorKind dissipator = DissipatorKind::QuantumOptical;
    double trace_tolerance = 1e-6;  // allowed trace drift per period
    double leak_threshold = 1e-4;   // allowed top-Fock-level population
    int record_stride = 100;        // record every n-th step (and the last)
    KernelKind kernel = KernelKind::Banded;
    bool store_states = false;      // keep full densities at recorded points

    void validate() const;
};

std::string_view to_string(DissipatorKind k);
std::string_view to_string(KernelKind k);
std::optional<DissipatorKind> dissipator_from_name(std::string_view name);
std::optional<KernelKind> kernel_from_name(std::string_view name);

/// H = lambda sigma_z + hbar omega (a^dag a + 1/2) + epsilon x sigma_z.
CompositeOperator build_hamiltonian(const PhysicalParams& p, const SpaceDescriptor& space);

/// d rho / dt with the configured dissipator and kernel.
Matrix master_equation_rhs(const CompositeDensity& rho, const PhysicalParams& p, const SpaceDescriptor& space,
                           const IntegratorConfig& config);

struct ObservableSample {
    double time = 0.0;
    double coherence = 0.0;  // 2 |<0| rho_Q |1>|
    double sigma_z = 0.0;
    double x_mean = 0.0;
    double p_mean = 0.0;
    double purity = 0.0;
    double trace_dev = 0.0;     // Re trace - 1
    double top_fock_pop = 0.0;  // population of the highest Fock level
};

/// O(N^2) observables of a composite state.
ObservableSample observe(const CompositeDensity& rho, const SpaceDescriptor& space);

struct TrajectoryPoint {
    ObservableSample sample;
    std::optional<CompositeDensity> state;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;  // strictly increasing times
    CompositeDensity final_state;
    PhysicalParams params;
    IntegratorConfig config;
    long steps = 0;
    double dt = 0.0;
};

/// Fixed-step classical RK4 from rho0.time() to t_end with
/// dt ~= T / steps_per_period, re-symmetrizing rho each step. Throws
/// IntegratorError on trace drift (or non-finite values) and TruncationError
/// when the top Fock level population exceeds the leak threshold.
Trajectory evolve(const CompositeDensity& rho0, double t_end, const PhysicalParams& p,
                  const SpaceDescriptor& space, const IntegratorConfig& config);

struct ObservableSeries {
    std::vector<ObservableSample> samples;

    /// max - min of <sigma_z> over the series.
    double sigma_z_drift() const;
};

ObservableSeries trajectory_observables(const Trajectory& traj);

}  // namespace cohprobe
