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

#include "cohprobe/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cohprobe/errors.hpp"
#include "cohprobe/states.hpp"

#ifndef COHPROBE_VERSION
#define COHPROBE_VERSION "0.0.0"
#endif

namespace cohprobe::cli {

std::string_view version() { return COHPROBE_VERSION; }

std::string_view to_string(Command c) {
    switch (c) {
        case Command::Feasibility: return "feasibility";
        case Command::Simulate: return "simulate";
        case Command::Protocol: return "protocol";
        case Command::Sweep: return "sweep";
    }
    return "";
}

std::optional<Command> command_from_name(std::string_view name) {
    for (Command c : {Command::Feasibility, Command::Simulate, Command::Protocol, Command::Sweep}) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- request

const std::set<std::string> kFluxKeys{"L", "C", "R", "Lambda", "mu", "theta"};
const std::set<std::string> kIonKeys{"N", "omega", "g", "eta0", "gamma", "theta", "ion_mass"};

std::string_view flux_quantum_name(FluxQuantumConvention c) {
    return c == FluxQuantumConvention::PlanckOver2e ? "h/2e" : "hbar/2e";
}

std::string_view format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) throw ConfigError("type mismatch at " + (path.empty() ? "<root>" : path) + ": expected object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) throw ConfigError("unknown key '" + join(path, item.key()) + "'");
    }
}

double get_number(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError("type mismatch at " + where + ": expected number, got " + v.dump());
    return v.get<double>();
}

long long get_integer(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError("type mismatch at " + where + ": expected integer, got " + v.dump());
    return v.get<long long>();
}

std::string get_string(const Json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError("type mismatch at " + where + ": expected string, got " + v.dump());
    return v.get<std::string>();
}

bool get_bool(const Json& v, const std::string& where) {
    if (!v.is_boolean()) throw ConfigError("type mismatch at " + where + ": expected boolean, got " + v.dump());
    return v.get<bool>();
}

template <class F>
void each(const Json& obj, const std::string& path, F&& f) {
    for (const auto& item : obj.items()) f(item.key(), item.value(), join(path, item.key()));
}

PhysicalParams realize(const RunSpec& s) {
    if (!s.preset || *s.preset == Preset::NaturalUnitsReference) {
        if (!s.realization.empty()) throw ConfigError("realization overrides need preset flux-lc or ion-trap");
        return natural_units_reference();
    }
    if (*s.preset == Preset::FluxLc) {
        FluxLcInputs in;
        in.convention = s.flux_quantum;
        for (const auto& [k, v] : s.realization) {
            if (!kFluxKeys.count(k)) throw ConfigError("unknown key 'realization." + k + "' for preset flux-lc");
            if (k == "L") in.inductance = v;
            if (k == "C") in.capacitance = v;
            if (k == "R") in.resistance = v;
            if (k == "Lambda") in.qubit_inductance = v;
            if (k == "mu") in.flux_linkage = v;
            if (k == "theta") in.theta = v;
        }
        return flux_lc_realization(in);
    }
    IonTrapInputs in;
    for (const auto& [k, v] : s.realization) {
        if (!kIonKeys.count(k)) throw ConfigError("unknown key 'realization." + k + "' for preset ion-trap");
        if (k == "N") {
            if (v != std::floor(v) || v < 1.0) throw DomainError("realization.N must be a positive integer");
            in.ion_count = static_cast<int>(v);
        }
        if (k == "omega") in.omega = v;
        if (k == "g") in.rabi = v;
        if (k == "eta0") in.lamb_dicke = v;
        if (k == "gamma") in.gamma = v;
        if (k == "theta") in.theta = v;
        if (k == "ion_mass") in.ion_mass = v;
    }
    return ion_trap_realization(in);
}

void apply_params(const Json& obj, PhysicalParams& p) {
    check_keys(obj, {"m", "omega", "gamma", "theta", "epsilon", "lambda", "omega_cut", "units"}, "params");
    // units first: switching the unit system must not clobber explicit values
    if (obj.contains("units")) {
        const std::string u = get_string(obj["units"], "params.units");
        if (u == "natural") p.units = UnitSystem::natural();
        else if (u == "si") p.units = UnitSystem::si();
        else throw ConfigError("unknown unit system '" + u + "' at params.units");
    }
    each(obj, "params", [&](const std::string& k, const Json& v, const std::string& where) {
        if (k == "units") return;
        if (k == "omega_cut") {
            if (v.is_null()) p.omega_cut.reset();
            else p.omega_cut = get_number(v, where);
            return;
        }
        const double x = get_number(v, where);
        if (k == "m") p.mass = x;
        if (k == "omega") p.omega = x;
        if (k == "gamma") p.gamma = x;
        if (k == "theta") p.theta = x;
        if (k == "epsilon") p.epsilon = x;
        if (k == "lambda") p.lambda = x;
    });
}

void apply_integrator(const Json& obj, IntegratorConfig& c) {
    check_keys(obj, {"steps_per_period", "dissipator", "trace_tolerance", "leak_threshold", "record_stride", "kernel"},
               "integrator");
    each(obj, "integrator", [&](const std::string& k, const Json& v, const std::string& where) {
        if (k == "steps_per_period") c.steps_per_period = static_cast<int>(get_integer(v, where));
        if (k == "record_stride") c.record_stride = static_cast<int>(get_integer(v, where));
        if (k == "trace_tolerance") c.trace_tolerance = get_number(v, where);
        if (k == "leak_threshold") c.leak_threshold = get_number(v, where);
        if (k == "dissipator") {
            const std::string name = get_string(v, where);
            const auto d = dissipator_from_name(name);
            if (!d) throw ConfigError("unknown dissipator '" + name + "' at " + where);
            c.dissipator = *d;
        }
        if (k == "kernel") {
            const std::string name = get_string(v, where);
            const auto kk = kernel_from_name(name);
            if (!kk) throw ConfigError("unknown kernel '" + name + "' at " + where);
            c.kernel = *kk;
        }
    });
}

}  // namespace

RunSpec spec_from_json(const Json& doc) {
    check_keys(doc, {"command", "preset", "realization", "params", "space", "integrator", "initial", "run", "sweep",
                     "output"},
               "");
    RunSpec s;
    if (!doc.contains("command")) throw ConfigError("missing key 'command'");
    {
        const std::string name = get_string(doc["command"], "command");
        const auto c = command_from_name(name);
        if (!c) throw ConfigError("unknown command '" + name + "'");
        s.command = *c;
    }
    if (doc.contains("preset") && !doc["preset"].is_null()) {
        const std::string name = get_string(doc["preset"], "preset");
        s.preset = preset_from_name(name);
        if (!s.preset) throw ConfigError("unknown preset '" + name + "'");
    }
    if (doc.contains("realization")) {
        const Json& r = doc["realization"];
        if (!r.is_object()) throw ConfigError("type mismatch at realization: expected object");
        each(r, "realization", [&](const std::string& k, const Json& v, const std::string& where) {
            if (k == "flux_quantum") {
                const std::string name = get_string(v, where);
                if (name == "h/2e") s.flux_quantum = FluxQuantumConvention::PlanckOver2e;
                else if (name == "hbar/2e") s.flux_quantum = FluxQuantumConvention::ReducedPlanckOver2e;
                else throw ConfigError("unknown flux quantum convention '" + name + "' (use h/2e or hbar/2e)");
                return;
            }
            s.realization[k] = get_number(v, where);
        });
    }
    if (s.flux_quantum != FluxQuantumConvention::PlanckOver2e && s.preset != Preset::FluxLc) {
        throw ConfigError("realization.flux_quantum applies only to preset flux-lc");
    }
    s.params = realize(s);
    if (doc.contains("params")) apply_params(doc["params"], s.params);

    if (doc.contains("space")) {
        check_keys(doc["space"], {"fock_dim"}, "space");
        if (doc["space"].contains("fock_dim")) {
            s.fock_dim = static_cast<int>(get_integer(doc["space"]["fock_dim"], "space.fock_dim"));
        }
    }
    if (doc.contains("integrator")) apply_integrator(doc["integrator"], s.integrator);

    if (doc.contains("initial")) {
        const Json& o = doc["initial"];
        check_keys(o, {"alpha_re", "alpha_im", "thermal_nbar"}, "initial");
        double re = s.alpha.real(), im = s.alpha.imag();
        if (o.contains("alpha_re")) re = get_number(o["alpha_re"], "initial.alpha_re");
        if (o.contains("alpha_im")) im = get_number(o["alpha_im"], "initial.alpha_im");
        s.alpha = {re, im};
        if (o.contains("thermal_nbar")) {
            if (o["thermal_nbar"].is_null()) s.thermal_nbar.reset();
            else s.thermal_nbar = get_number(o["thermal_nbar"], "initial.thermal_nbar");
        }
    }
    if (doc.contains("run")) {
        const Json& o = doc["run"];
        check_keys(o, {"periods", "samples", "seed"}, "run");
        if (o.contains("periods")) s.periods = get_number(o["periods"], "run.periods");
        if (o.contains("samples")) s.samples = static_cast<int>(get_integer(o["samples"], "run.samples"));
        if (o.contains("seed")) {
            if (!o["seed"].is_number_unsigned()) {
                throw ConfigError("type mismatch at run.seed: expected non-negative integer, got " + o["seed"].dump());
            }
            s.seed = o["seed"].get<std::uint64_t>();
        }
    }
    if (doc.contains("sweep")) {
        const Json& o = doc["sweep"];
        check_keys(o, {"axis", "values", "mode"}, "sweep");
        if (o.contains("axis")) {
            const std::string name = get_string(o["axis"], "sweep.axis");
            const auto a = sweep_axis_from_name(name);
            if (!a) throw ConfigError("unknown sweep axis '" + name + "'");
            s.axis = *a;
        }
        if (o.contains("mode")) {
            const std::string name = get_string(o["mode"], "sweep.mode");
            const auto m = sweep_mode_from_name(name);
            if (!m) throw ConfigError("unknown sweep mode '" + name + "'");
            s.mode = *m;
        }
        if (o.contains("values")) {
            if (!o["values"].is_array()) throw ConfigError("type mismatch at sweep.values: expected array");
            s.values.clear();
            for (std::size_t i = 0; i < o["values"].size(); ++i) {
                s.values.push_back(get_number(o["values"][i], "sweep.values[" + std::to_string(i) + "]"));
            }
        }
    }
    if (doc.contains("output")) {
        const Json& o = doc["output"];
        check_keys(o, {"format", "path", "strict"}, "output");
        if (o.contains("format")) {
            const std::string f = get_string(o["format"], "output.format");
            if (f == "csv") s.format = OutputFormat::Csv;
            else if (f == "json") s.format = OutputFormat::Json;
            else throw ConfigError("unknown output format '" + f + "'");
        }
        if (o.contains("path")) {
            if (o["path"].is_null()) s.output.reset();
            else s.output = get_string(o["path"], "output.path");
        }
        if (o.contains("strict")) s.strict = get_bool(o["strict"], "output.strict");
    }

    s.params.validate();
    s.integrator.validate();
    if (s.fock_dim < 2) throw DomainError("fock_dim must be >= 2");
    if (!(s.periods > 0.0) || !std::isfinite(s.periods)) throw DomainError("periods must be positive");
    if (s.samples < 0) throw DomainError("samples must be >= 0");
    if (s.thermal_nbar && !(*s.thermal_nbar >= 0.0)) throw DomainError("thermal_nbar must be non-negative");
    if (s.command == Command::Sweep && s.values.empty()) throw ConfigError("sweep needs --values");
    return s;
}

Json spec_to_json(const RunSpec& s) {
    Json j;
    j["command"] = to_string(s.command);
    j["preset"] = s.preset ? Json(preset_name(*s.preset)) : Json(nullptr);
    Json real = Json::object();
    if (s.preset == Preset::FluxLc) real["flux_quantum"] = flux_quantum_name(s.flux_quantum);
    for (const auto& [k, v] : s.realization) real[k] = v;
    j["realization"] = real;
    const PhysicalParams& p = s.params;
    j["params"] = {{"m", p.mass},
                   {"omega", p.omega},
                   {"gamma", p.gamma},
                   {"theta", p.theta},
                   {"epsilon", p.epsilon},
                   {"lambda", p.lambda},
                   {"omega_cut", p.omega_cut ? Json(*p.omega_cut) : Json(nullptr)},
                   {"units", p.units.name}};
    j["space"] = {{"fock_dim", s.fock_dim}};
    const IntegratorConfig& c = s.integrator;
    j["integrator"] = {{"steps_per_period", c.steps_per_period},
                       {"dissipator", to_string(c.dissipator)},
                       {"trace_tolerance", c.trace_tolerance},
                       {"leak_threshold", c.leak_threshold},
                       {"record_stride", c.record_stride},
                       {"kernel", to_string(c.kernel)}};
    j["initial"] = {{"alpha_re", s.alpha.real()},
                    {"alpha_im", s.alpha.imag()},
                    {"thermal_nbar", s.thermal_nbar ? Json(*s.thermal_nbar) : Json(nullptr)}};
    j["run"] = {{"periods", s.periods}, {"samples", s.samples}, {"seed", s.seed}};
    j["sweep"] = {{"axis", to_string(s.axis)}, {"values", s.values}, {"mode", to_string(s.mode)}};
    j["output"] = {{"format", format_name(s.format)},
                   {"path", s.output ? Json(*s.output) : Json(nullptr)},
                   {"strict", s.strict}};
    return j;
}

// ---------------------------------------------------------------- flags

namespace {

struct FlagBinding {
    std::string section;
    std::string key;
    CLI::Option* opt;
    enum Kind { Number, Integer, Unsigned, Text } kind;
};

struct FlagSet {
    std::vector<FlagBinding> bindings;
    CLI::Option* config = nullptr;
    CLI::Option* preset = nullptr;
    CLI::Option* realization = nullptr;
    CLI::Option* values = nullptr;
    CLI::Option* strict = nullptr;
};

CLI::Option* bind(CLI::App* app, FlagSet& fs, const std::string& flag, const std::string& section,
                  const std::string& key, FlagBinding::Kind kind, const std::string& help) {
    CLI::Option* opt = nullptr;
    switch (kind) {
        case FlagBinding::Number: opt = app->add_option(flag, help); break;
        case FlagBinding::Integer: opt = app->add_option(flag, help); break;
        case FlagBinding::Unsigned: opt = app->add_option(flag, help); break;
        case FlagBinding::Text: opt = app->add_option(flag, help); break;
    }
    fs.bindings.push_back({section, key, opt, kind});
    return opt;
}

void add_common(CLI::App* app, FlagSet& fs) {
    fs.config = app->add_option("--config", "JSON request or previously emitted envelope");
    fs.preset = app->add_option("--preset", "flux-lc | ion-trap | natural-units-reference");
    fs.realization = app->add_option("--realization", "preset input KEY=VALUE")
                         ->allow_extra_args(false)
                         ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    bind(app, fs, "--flux-quantum", "realization", "flux_quantum", FlagBinding::Text, "h/2e | hbar/2e");
    bind(app, fs, "--m", "params", "m", FlagBinding::Number, "oscillator mass");
    bind(app, fs, "--omega", "params", "omega", FlagBinding::Number, "angular frequency");
    bind(app, fs, "--gamma", "params", "gamma", FlagBinding::Number, "relaxation rate");
    bind(app, fs, "--theta", "params", "theta", FlagBinding::Number, "bath temperature");
    bind(app, fs, "--epsilon", "params", "epsilon", FlagBinding::Number, "qubit-oscillator coupling");
    bind(app, fs, "--lambda", "params", "lambda", FlagBinding::Number, "qubit energy");
    bind(app, fs, "--omega-cut", "params", "omega_cut", FlagBinding::Number, "bath cutoff frequency");
    bind(app, fs, "--units", "params", "units", FlagBinding::Text, "natural | si");
    bind(app, fs, "--format", "output", "format", FlagBinding::Text, "csv | json");
    bind(app, fs, "--output", "output", "path", FlagBinding::Text, "output file (default: stdout)");
}

void add_numeric(CLI::App* app, FlagSet& fs) {
    bind(app, fs, "--fock-dim", "space", "fock_dim", FlagBinding::Integer, "oscillator truncation");
    bind(app, fs, "--steps-per-period", "integrator", "steps_per_period", FlagBinding::Integer, "RK4 steps per period");
    bind(app, fs, "--dissipator", "integrator", "dissipator", FlagBinding::Text, "quantum-optical | caldeira-leggett");
    bind(app, fs, "--kernel", "integrator", "kernel", FlagBinding::Text, "banded | dense-reference");
    bind(app, fs, "--trace-tol", "integrator", "trace_tolerance", FlagBinding::Number, "trace drift per period");
    bind(app, fs, "--leak-threshold", "integrator", "leak_threshold", FlagBinding::Number, "top Fock population");
    bind(app, fs, "--record-stride", "integrator", "record_stride", FlagBinding::Integer, "record every n-th step");
    bind(app, fs, "--alpha-re", "initial", "alpha_re", FlagBinding::Number, "Re alpha");
    bind(app, fs, "--alpha-im", "initial", "alpha_im", FlagBinding::Number, "Im alpha");
}

Json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (doc.is_object() && doc.contains("resolved")) {
        Json r = doc["resolved"];
        return r;
    }
    return doc;
}

}  // namespace

RunSpec load_spec(const std::vector<std::string>& args) {
    CLI::App app{"cohprobe: qubit-probed oscillator coherence simulator", "cohprobe"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    std::map<Command, std::pair<CLI::App*, FlagSet>> subs;
    for (Command c : {Command::Feasibility, Command::Simulate, Command::Protocol, Command::Sweep}) {
        const char* help = "";
        switch (c) {
            case Command::Feasibility: help = "dimensionless design and regime conditions"; break;
            case Command::Simulate: help = "integrate the master equation and record observables"; break;
            case Command::Protocol: help = "two-step coherence probe (single or thermal)"; break;
            case Command::Sweep: help = "scan one parameter axis"; break;
        }
        CLI::App* sub = app.add_subcommand(std::string(to_string(c)), help);
        FlagSet fs;
        add_common(sub, fs);
        if (c != Command::Feasibility) add_numeric(sub, fs);
        if (c == Command::Feasibility) fs.strict = sub->add_flag("--strict", "exit 5 when a condition fails");
        if (c == Command::Simulate) {
            bind(sub, fs, "--thermal-nbar", "initial", "thermal_nbar", FlagBinding::Number, "thermal oscillator input");
            bind(sub, fs, "--periods", "run", "periods", FlagBinding::Number, "duration in periods");
        }
        if (c == Command::Protocol) {
            bind(sub, fs, "--samples", "run", "samples", FlagBinding::Integer, "thermal samples (0: single run)");
            bind(sub, fs, "--seed", "run", "seed", FlagBinding::Unsigned, "RNG seed");
        }
        if (c == Command::Sweep) {
            bind(sub, fs, "--axis", "sweep", "axis", FlagBinding::Text, "theta | m | epsilon | gamma | omega");
            fs.values = sub->add_option("--values", "comma-separated axis values")
                            ->delimiter(',')
                            ->allow_extra_args(false)
                            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            bind(sub, fs, "--mode", "sweep", "mode", FlagBinding::Text, "analytic | numeric | both");
        }
        subs.emplace(c, std::make_pair(sub, std::move(fs)));
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);  // other CLI::ParseError kinds propagate to run()
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        throw UsageRequest{parsed.empty() ? app.help() : parsed.front()->help()};
    } catch (const CLI::CallForVersion&) {
        throw UsageRequest{std::string(version()) + "\n"};
    }

    for (auto& [cmd, entry] : subs) {
        auto& [sub, fs] = entry;
        if (!sub->parsed()) continue;
        Json doc = Json::object();
        if (fs.config->count()) doc = read_config(fs.config->as<std::string>());
        if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
        if (doc.contains("command") && doc["command"] != Json(to_string(cmd))) {
            throw ConfigError("conflicting command: config has " + doc["command"].dump() + ", flags say '" +
                              std::string(to_string(cmd)) + "'");
        }
        doc["command"] = to_string(cmd);
        if (fs.preset->count()) {
            const std::string name = fs.preset->as<std::string>();
            // a new preset replaces values that came from a different one
            if (doc.contains("preset") && doc["preset"] != Json(name)) {
                doc.erase("params");
                doc.erase("realization");
            }
            doc["preset"] = name;
        }
        for (const auto& b : fs.bindings) {
            if (!b.opt->count()) continue;
            Json& slot = doc[b.section][b.key];
            switch (b.kind) {
                case FlagBinding::Number: slot = b.opt->as<double>(); break;
                case FlagBinding::Integer: slot = b.opt->as<long long>(); break;
                case FlagBinding::Unsigned: slot = b.opt->as<std::uint64_t>(); break;
                case FlagBinding::Text: slot = b.opt->as<std::string>(); break;
            }
        }
        if (fs.realization->count()) {
            for (const std::string& kv : fs.realization->as<std::vector<std::string>>()) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw ConfigError("--realization expects KEY=VALUE, got '" + kv + "'");
                }
                const std::string key = kv.substr(0, eq);
                const std::string text = kv.substr(eq + 1);
                double v = 0.0;
                const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
                if (ec != std::errc() || ptr != text.data() + text.size()) {
                    throw ConfigError("--realization " + key + ": '" + text + "' is not a number");
                }
                doc["realization"][key] = v;
            }
        }
        if (fs.values && fs.values->count()) doc["sweep"]["values"] = fs.values->as<std::vector<double>>();
        if (fs.strict && fs.strict->count()) doc["output"]["strict"] = true;
        return spec_from_json(doc);
    }
    throw ConfigError("exactly one command is required");
}

// ---------------------------------------------------------------- results

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json condition_json(const Condition& c) {
    return {{"ratio", number(c.ratio)}, {"pass", c.pass}, {"evaluated", c.evaluated}};
}

Json feasibility_json(const FeasibilityReport& r) {
    return {{"momentum_shift", condition_json(r.momentum_shift)},
            {"separation", condition_json(r.separation)},
            {"coherence", condition_json(r.coherence)},
            {"markov", condition_json(r.markov)},
            {"underdamped", condition_json(r.underdamped)},
            {"all_pass", r.all_pass()}};
}

Json design_json(const DimensionlessDesign& d) {
    return {{"chi", number(d.chi)},
            {"quality", number(d.quality)},
            {"nbar", number(d.nbar)},
            {"dx_over_2dx", number(d.dx_over_2dx)},
            {"dp_over_2dp", number(d.dp_over_2dp)},
            {"d01", number(d.d01)},
            {"phi01", number(d.phi01)}};
}

Json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Json protocol_json(const ProtocolResult& r) {
    return {{"alpha", complex_json(r.alpha)},
            {"c_half", r.c_half},
            {"c_full", r.c_full},
            {"d_eff", number(r.d_eff)},
            {"d01_analytic", r.d01_analytic},
            {"relative_discrepancy", r.d01_analytic > 0.0 ? number(r.d_eff / r.d01_analytic - 1.0) : Json(nullptr)},
            {"branch_separation", r.branch_separation},
            {"revival_fidelity", r.revival_fidelity},
            {"half_period",
             {{"center0", complex_json(r.center0)},
              {"center1", complex_json(r.center1)},
              {"branch_overlap", r.half_overlap},
              {"d_eff_half", number(r.d_eff_half)}}}};
}

const std::vector<std::string> kTrajectoryColumns{"time",   "coherence", "sigma_z",  "x_mean",
                                                  "p_mean", "purity",    "trace_dev", "top_fock_pop"};

std::vector<double> sample_row(const ObservableSample& s) {
    return {s.time, s.coherence, s.sigma_z, s.x_mean, s.p_mean, s.purity, s.trace_dev, s.top_fock_pop};
}

void regime_warnings(const FeasibilityReport& r, std::vector<std::string>& w) {
    auto check = [&](const char* name, const Condition& c) {
        if (!c.evaluated) {
            w.push_back(std::string("regime condition ") + name + " not evaluated (omega_cut not given)");
        } else if (!c.pass) {
            std::ostringstream os;
            os << "regime condition " << name << " fails (ratio " << c.ratio << ")";
            w.push_back(os.str());
        }
    };
    check("momentum_shift", r.momentum_shift);
    check("separation", r.separation);
    check("coherence", r.coherence);
    check("markov", r.markov);
    check("underdamped", r.underdamped);
}

}  // namespace

Json compute_results(const RunSpec& s, std::vector<std::string>& warnings) {
    const PhysicalParams& p = s.params;
    if (s.preset == Preset::FluxLc) {
        warnings.push_back(std::string("flux quantum convention ") + std::string(flux_quantum_name(s.flux_quantum)) +
                           (s.flux_quantum == FluxQuantumConvention::PlanckOver2e
                                ? "; the hbar/2e alternative gives chi about 2 pi times smaller"
                                : "; the h/2e default gives chi about 2 pi times larger"));
    }
    const DimensionlessDesign design = design_summary(p);
    const FeasibilityReport regime = feasibility(design, p);

    if (s.command == Command::Feasibility) {
        regime_warnings(regime, warnings);
        const SpaceDescriptor sp = build_space(2, p.mass, p.omega, p.units);
        const double diff = diffusion_coefficient(p);
        const double dx = branch_separation(p);
        Json derived = {{"period", p.period()},
                        {"delta_x", sp.delta_x},
                        {"delta_p", sp.delta_p},
                        {"diffusion", diff},
                        {"branch_separation", dx},
                        {"momentum_shift", momentum_shift(p)},
                        {"tau_d", (diff > 0.0 && dx != 0.0) ? Json(decoherence_time(diff, dx, p.units.hbar))
                                                            : Json(nullptr)}};
        const double chi_nbar = design.chi * design.nbar;
        Json ratios = {
            {"q2_over_chi_nbar_sq", number(regime.momentum_shift.ratio)},
            {"chi2_nbar_over_q", number(design.chi * chi_nbar / design.quality)},
            {"q2_over_nbar_sq", number(design.quality * design.quality / (design.nbar * design.nbar))}};
        return {{"design", design_json(design)},
                {"estimate_ratios",
                 {{"separation", number(design.estimates.separation)},
                  {"momentum_shift", number(design.estimates.momentum_shift)},
                  {"exponent", number(design.estimates.exponent)}}},
                {"derived", derived},
                {"ratios", ratios},
                {"feasibility", feasibility_json(regime)}};
    }

    warnings.push_back("dissipator " + std::string(to_string(s.integrator.dissipator)));
    regime_warnings(regime, warnings);

    if (s.command == Command::Simulate) {
        const SpaceDescriptor space = build_space(s.fock_dim, p.mass, p.omega, p.units);
        OscillatorInit init = CoherentLabel{s.alpha};
        if (s.thermal_nbar) init = ThermalSpec{*s.thermal_nbar};
        const CompositeDensity rho0 = prepare_protocol_input(init, space);
        const Trajectory traj = evolve(rho0, s.periods * p.period(), p, space, s.integrator);
        Json rows = Json::array();
        for (const auto& pt : traj.points) rows.push_back(sample_row(pt.sample));
        return {{"steps", traj.steps},
                {"dt", traj.dt},
                {"design", design_json(design)},
                {"trajectory", {{"columns", kTrajectoryColumns}, {"rows", rows}}}};
    }

    if (s.command == Command::Protocol) {
        const SpaceDescriptor space = build_space(s.fock_dim, p.mass, p.omega, p.units);
        if (s.samples == 0) {
            const ProtocolResult r = run_single({s.alpha}, p, space, s.integrator);
            return {{"mode", "single"},
                    {"design", design_json(design)},
                    {"feasibility", feasibility_json(regime)},
                    {"result", protocol_json(r)}};
        }
        const ThermalProtocolResult t = run_thermal(p, space, s.integrator, s.samples, s.seed);
        Json samples = Json::array();
        for (const auto& r : t.samples) samples.push_back(protocol_json(r));
        return {{"mode", "thermal"},
                {"design", design_json(design)},
                {"feasibility", feasibility_json(regime)},
                {"rng", t.rng},
                {"seed", t.seed},
                {"nbar", t.nbar},
                {"n_samples", t.samples.size()},
                {"rejected", t.rejected},
                {"mean_c_full", t.mean_c_full},
                {"se_c_full", t.se_c_full},
                {"mean_d_eff", t.mean_d_eff},
                {"se_d_eff", t.se_d_eff},
                {"sd_d_eff", t.sd_d_eff},
                {"cv_d_eff", number(t.cv_d_eff())},
                {"d01_analytic", design.d01},
                {"samples", samples}};
    }

    const SweepTable table = sweep(p, s.axis, s.values, s.mode, s.fock_dim, s.integrator, s.alpha);
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"axis_value", r.axis_value},
                        {"epsilon", r.epsilon},
                        {"d01_analytic", number(r.d01_analytic)},
                        {"d_eff_numeric", number(r.d_eff_numeric)},
                        {"c_full", number(r.c_full)},
                        {"feasibility", r.error.empty() ? feasibility_json(r.feasibility) : Json(nullptr)},
                        {"error", r.error.empty() ? Json(nullptr) : Json(r.error)}});
        if (!r.error.empty()) warnings.push_back("sweep row " + std::to_string(r.axis_value) + ": " + r.error);
    }
    if (s.axis == SweepAxis::Mass) warnings.push_back("m axis: epsilon scaled with m to hold the branch separation");
    return {{"axis", to_string(table.axis)}, {"mode", to_string(table.mode)}, {"rows", rows}};
}

// ---------------------------------------------------------------- output

namespace {

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string csv_flag(const Json& cond) {
    if (!cond.is_object()) return "";
    if (!cond["evaluated"].get<bool>()) return "na";
    return cond["pass"].get<bool>() ? "1" : "0";
}

double json_double(const Json& v) { return v.is_null() ? kNaN : v.get<double>(); }

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const RunSpec& s, const Json& results) {
    std::ostringstream os;
    os << "# cohprobe " << version() << " schema_version=" << kSchemaVersion << " command=" << to_string(s.command)
       << " units=" << s.params.units.name << "\n";
    const char* conds[] = {"momentum_shift", "separation", "coherence", "markov", "underdamped"};
    switch (s.command) {
        case Command::Feasibility: {
            os << "condition,ratio,pass,evaluated\n";
            for (const char* c : conds) {
                const Json& j = results["feasibility"][c];
                os << c << "," << csv_number(json_double(j["ratio"])) << "," << (j["pass"].get<bool>() ? 1 : 0) << ","
                   << (j["evaluated"].get<bool>() ? 1 : 0) << "\n";
            }
            break;
        }
        case Command::Simulate: {
            for (std::size_t i = 0; i < kTrajectoryColumns.size(); ++i) os << (i ? "," : "") << kTrajectoryColumns[i];
            os << "\n";
            for (const Json& row : results["trajectory"]["rows"]) {
                for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_number(json_double(row[i]));
                os << "\n";
            }
            break;
        }
        case Command::Protocol: {
            os << "sample,alpha_re,alpha_im,c_half,c_full,d_eff,d01_analytic,branch_separation,revival_fidelity\n";
            std::vector<Json> list;
            if (results["mode"] == "single") list.push_back(results["result"]);
            else list.assign(results["samples"].begin(), results["samples"].end());
            for (std::size_t i = 0; i < list.size(); ++i) {
                const Json& r = list[i];
                os << i << "," << csv_number(r["alpha"]["re"].get<double>()) << ","
                   << csv_number(r["alpha"]["im"].get<double>());
                for (const char* k : {"c_half", "c_full", "d_eff", "d01_analytic", "branch_separation",
                                      "revival_fidelity"}) {
                    os << "," << csv_number(json_double(r[k]));
                }
                os << "\n";
            }
            break;
        }
        case Command::Sweep: {
            os << "axis_value,d01_analytic,d_eff_numeric,c_full";
            for (const char* c : conds) os << "," << c << "_pass";
            os << ",epsilon,error\n";
            for (const Json& r : results["rows"]) {
                os << csv_number(r["axis_value"].get<double>()) << "," << csv_number(json_double(r["d01_analytic"]))
                   << "," << csv_number(json_double(r["d_eff_numeric"])) << ","
                   << csv_number(json_double(r["c_full"]));
                for (const char* c : conds) os << "," << (r["feasibility"].is_null() ? "" : csv_flag(r["feasibility"][c]));
                os << "," << csv_number(r["epsilon"].get<double>()) << ","
                   << (r["error"].is_null() ? "" : csv_text(r["error"].get<std::string>())) << "\n";
            }
            break;
        }
    }
    return os.str();
}

Json envelope_base() {
    return {{"artifact", "cohprobe"}, {"version", version()}, {"schema_version", kSchemaVersion}};
}

std::optional<std::string> output_path(const RunSpec& s) {
    if (s.output) return s.output;
    if (const char* dir = std::getenv("COHPROBE_OUTPUT_DIR"); dir && *dir) {
        const std::string name =
            "cohprobe-" + std::string(to_string(s.command)) + (s.format == OutputFormat::Csv ? ".csv" : ".json");
        return (std::filesystem::path(dir) / name).string();
    }
    return std::nullopt;
}

void write_file(const std::string& path, const std::string& text) {
    const std::filesystem::path fp(path);
    if (fp.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(fp.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
    f << text;
    if (!f) throw ConfigError("failed writing output file '" + path + "'");
}

Json error_envelope(ErrorKind kind, const std::string& message, int code) {
    Json e = envelope_base();
    e["status"] = "error";
    e["error"] = {{"kind", to_string(kind)}, {"message", message}, {"exit_code", code}};
    return e;
}

}  // namespace

int run_command(const RunSpec& s, std::ostream& out, std::ostream& err) {
    try {
        std::vector<std::string> warnings;
        const Json results = compute_results(s, warnings);

        Json env = envelope_base();
        env["command"] = to_string(s.command);
        env["status"] = "ok";
        env["unit_system"] = {{"name", s.params.units.name}, {"hbar", s.params.units.hbar}, {"k_B", s.params.units.k_B}};
        env["resolved"] = spec_to_json(s);
        env["results"] = results;
        env["warnings"] = warnings;

        const std::string json_text = env.dump(2) + "\n";
        const auto path = output_path(s);
        if (s.format == OutputFormat::Json) {
            if (path) write_file(*path, json_text);
            else out << json_text;
        } else {
            const std::string csv = to_csv(s, results);
            if (path) {
                write_file(*path, csv);
                write_file(*path + ".json", json_text);  // envelope sidecar for replay
            } else {
                out << csv;
            }
        }
        if (s.command == Command::Feasibility && s.strict && !results["feasibility"]["all_pass"].get<bool>()) {
            const int code = exit_code(ErrorKind::Infeasible);
            err << error_envelope(ErrorKind::Infeasible, "regime conditions not all satisfied", code).dump(2) << "\n";
            return code;
        }
        return 0;
    } catch (const Error& e) {
        const int code = exit_code(e.kind());
        Json env = error_envelope(e.kind(), e.what(), code);
        if (const auto* t = dynamic_cast<const TruncationError*>(&e)) {
            env["error"]["magnitude"] = number(t->magnitude());
            env["error"]["step"] = t->step();
        }
        if (const auto* t = dynamic_cast<const IntegratorError*>(&e)) {
            env["error"]["magnitude"] = number(t->magnitude());
            env["error"]["step"] = t->step();
        }
        err << env.dump(2) << "\n";
        return code;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    try {
        spec = load_spec(args);
    } catch (const UsageRequest& u) {
        out << u.text;
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = exit_code(ErrorKind::Config);
        err << error_envelope(ErrorKind::Config, e.what(), code).dump(2) << "\n";
        return code;
    } catch (const Error& e) {
        const int code = exit_code(e.kind());
        err << error_envelope(e.kind(), e.what(), code).dump(2) << "\n";
        return code;
    }
    return run_command(spec, out, err);
}

}  // namespace cohprobe::cli
