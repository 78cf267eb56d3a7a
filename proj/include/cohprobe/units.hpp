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

#include <string>

namespace cohprobe {

/// Physical constants in SI (2019 exact definitions where applicable).
namespace si {
inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double boltzmann = 1.380649e-23;        // J / K
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass = 1.66053906660e-27; // kg
}  // namespace si

/// The unit system a run is expressed in. Only hbar and k_B enter the
/// formulas; everything else is carried in caller-supplied units.
struct UnitSystem {
    std::string name = "natural";
    double hbar = 1.0;
    double k_B = 1.0;

    static UnitSystem natural() { return {"natural", 1.0, 1.0}; }
    static UnitSystem si() { return {"si", si::hbar, si::boltzmann}; }

    bool operator==(const UnitSystem&) const = default;
};

}  // namespace cohprobe
