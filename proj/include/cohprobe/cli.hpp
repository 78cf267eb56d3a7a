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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cohprobe/analytic.hpp"
#include "cohprobe/dynamics.hpp"
#include "cohprobe/protocol.hpp"

namespace cohprobe::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
std::string_view version();

enum class Command { Feasibility, Simulate, Protocol, Sweep };
enum class OutputFormat { Csv, Json };

std::string_view to_string(Command c);
std::optional<Command> command_from_name(std::string_view name);

/// Fully resolved request. Resolution order: preset defaults, then
/// realization overrides (flux-lc / ion-trap inputs), then the config file,
/// then command-line flags; later layers win field by field.
struct RunSpec {
    Command command = Command::Feasibility;
    std::optional<Preset> preset;
    std::map<std::string, double> realization;
    FluxQuantumConvention flux_quantum = FluxQuantumConvention::PlanckOver2e;

    PhysicalParams params;
    int fock_dim = 48;
    IntegratorConfig integrator;

    Complex alpha{0.0, 0.0};
    std::optional<double> thermal_nbar;  // simulate: start from a thermal oscillator
    double periods = 1.0;                // simulate: duration in oscillator periods
    int samples = 0;                     // protocol: 0 runs a single coherent input
    std::uint64_t seed = 42;

    SweepAxis axis = SweepAxis::Theta;
    std::vector<double> values;
    SweepMode mode = SweepMode::Analytic;

    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> output;  // file path; stdout when absent
    bool strict = false;                // feasibility: exit 5 when a condition fails
};

/// Thrown by load_spec for --help / --version; carries the text to print.
struct UsageRequest {
    std::string text;
};

/// Parses argv-style tokens (without the program name). A --config file may
/// hold a request document or a previously emitted envelope, whose
/// "resolved" section is then replayed. Throws ConfigError / DomainError.
RunSpec load_spec(const std::vector<std::string>& args);

/// Resolves a request document (same schema as the config file).
RunSpec spec_from_json(const Json& doc);

/// The "resolved" section of an envelope; spec_from_json(spec_to_json(s))
/// reproduces s.
Json spec_to_json(const RunSpec& spec);

/// Executes the request and writes its output. Returns the process exit code;
/// on failure a JSON error envelope goes to err.
int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// load_spec + run_command with error mapping; --help prints usage to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The results payload of an envelope, without writing anything.
Json compute_results(const RunSpec& spec, std::vector<std::string>& warnings);

}  // namespace cohprobe::cli
