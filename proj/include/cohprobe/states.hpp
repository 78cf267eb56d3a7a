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
#include <random>
#include <string_view>
#include <variant>

#include "cohprobe/hilbert.hpp"

namespace cohprobe {

struct CoherentLabel {
    Complex alpha{0.0, 0.0};
};

struct ThermalSpec {
    double nbar = 0.0;
};

/// The generator used for every stochastic step. Its name is written into
/// report metadata so a seed identifies a sample sequence unambiguously.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64";

/// Default ceiling on the pre-renormalization norm deficit of a truncated
/// coherent state.
inline constexpr double kCoherentDeficitTolerance = 1e-8;

/// A-priori guard: |alpha|^2 + 3|alpha| + 3 <= fock_dim (Poisson mean plus
/// three standard deviations).
bool truncation_adequate(double abs_alpha, int fock_dim);

/// 1 - sum_{n < fock_dim} |c_n|^2 for the untruncated coherent amplitudes.
double coherent_norm_deficit(Complex alpha, int fock_dim);

/// Normalized |alpha> truncated to fock_dim levels. Throws TruncationError
/// (carrying the norm deficit) when the guard fails or the deficit exceeds
/// `deficit_tolerance`.
Vector coherent_state(const CoherentLabel& label, const SpaceDescriptor& space,
                      double deficit_tolerance = kCoherentDeficitTolerance);

/// Diagonal Boltzmann state with weights (nbar/(nbar+1))^n, renormalized.
/// Throws TruncationError when the discarded tail weight exceeds 1e-6.
Matrix thermal_state(const ThermalSpec& spec, const SpaceDescriptor& space);

/// Draws alpha from the Glauber P-function (1/pi nbar) exp(-|alpha|^2/nbar).
CoherentLabel sample_coherent_label(const ThermalSpec& spec, Rng& rng);
CoherentLabel sample_coherent_label(const ThermalSpec& spec, std::uint64_t seed);

using OscillatorInit = std::variant<CoherentLabel, ThermalSpec, Matrix>;

/// |+><+|_Q (x) rho_A(0).
CompositeDensity prepare_protocol_input(const OscillatorInit& init, const SpaceDescriptor& space);

}  // namespace cohprobe
