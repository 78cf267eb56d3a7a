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

#include "cohprobe/protocol.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "cohprobe/errors.hpp"

namespace cohprobe {

double branch_excursion(Complex alpha, const DimensionlessDesign& d) {
    return std::abs(alpha) + 2.0 * std::abs(d.chi) + std::abs(d.dp_over_2dp);
}

namespace {

Complex branch_center(const CompositeDensity& rho, int q) {
    const int n = rho.fock_dim();
    const auto b = rho.block(q, q);
    Complex a_mean(0.0);
    for (int k = 0; k + 1 < n; ++k) a_mean += std::sqrt(k + 1.0) * b(k + 1, k);
    return a_mean / b.trace();
}

}  // namespace

ProtocolResult run_single(const CoherentLabel& alpha, const PhysicalParams& p, const SpaceDescriptor& space,
                          const IntegratorConfig& config) {
    p.validate();
    config.validate();
    ProtocolResult r;
    r.alpha = alpha.alpha;
    r.design = design_summary(p);
    r.regime = feasibility(r.design, p);
    r.d01_analytic = r.design.d01;
    r.branch_separation = r.design.dx_over_2dx;

    const double excursion = branch_excursion(alpha.alpha, r.design);
    if (!truncation_adequate(excursion, space.fock_dim)) {
        std::ostringstream os;
        os << "branch excursion " << excursion << " does not fit fock_dim=" << space.fock_dim
           << " (needs r^2 + 3r + 3 <= fock_dim)";
        throw InfeasibleError(os.str());
    }

    const double period = p.period();
    const CompositeDensity rho0 = prepare_protocol_input(alpha, space);
    const Trajectory first = evolve(rho0, 0.5 * period, p, space, config);
    const Trajectory second = evolve(first.final_state, period, p, space, config);

    const CompositeDensity& half = first.final_state;
    r.c_half = qubit_coherence(partial_trace_oscillator(half));
    r.center0 = branch_center(half, 0);
    r.center1 = branch_center(half, 1);
    r.half_overlap = std::exp(-0.5 * std::norm(r.center0 - r.center1));
    r.d_eff_half = -std::log(r.c_half / r.half_overlap);

    const CompositeDensity& full = second.final_state;
    r.c_full = qubit_coherence(partial_trace_oscillator(full));
    r.d_eff = -0.5 * std::log(r.c_full);
    const Vector psi = coherent_state(alpha, space);
    r.revival_fidelity = fidelity_with_pure(psi, partial_trace_qubit(full));
    return r;
}

ThermalProtocolResult run_thermal(const PhysicalParams& p, const SpaceDescriptor& space, const IntegratorConfig& config,
                                  int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw DomainError("n_samples must be >= 1");
    p.validate();
    ThermalProtocolResult out;
    out.seed = seed;
    out.nbar = thermal_occupation(p);
    const DimensionlessDesign design = design_summary(p);
    const double max_rejected = n_samples / 9.0;  // rejected / total draws <= 10 %

    Rng rng(seed);
    std::vector<CoherentLabel> labels;
    labels.reserve(n_samples);
    while (static_cast<int>(labels.size()) < n_samples) {
        const CoherentLabel label = sample_coherent_label(ThermalSpec{out.nbar}, rng);
        if (truncation_adequate(branch_excursion(label.alpha, design), space.fock_dim)) {
            labels.push_back(label);
            continue;
        }
        if (++out.rejected > max_rejected) {
            std::ostringstream os;
            os << "thermal sampling rejected " << out.rejected << " draws for " << labels.size()
               << " accepted; fock_dim=" << space.fock_dim << " is too small for nbar=" << out.nbar;
            throw InfeasibleError(os.str());
        }
    }

    out.samples.resize(n_samples);
    std::vector<std::exception_ptr> errors(n_samples);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n_samples; ++i) {
        try {
            out.samples[i] = run_single(labels[i], p, space, config);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const double n = n_samples;
    double sum_c = 0.0, sum_d = 0.0;
    for (const auto& s : out.samples) {
        sum_c += s.c_full;
        sum_d += s.d_eff;
    }
    out.mean_c_full = sum_c / n;
    out.mean_d_eff = sum_d / n;
    if (n_samples > 1) {
        double ss_c = 0.0, ss_d = 0.0;
        for (const auto& s : out.samples) {
            ss_c += (s.c_full - out.mean_c_full) * (s.c_full - out.mean_c_full);
            ss_d += (s.d_eff - out.mean_d_eff) * (s.d_eff - out.mean_d_eff);
        }
        const double var_c = ss_c / (n - 1.0);
        const double var_d = ss_d / (n - 1.0);
        out.sd_d_eff = std::sqrt(var_d);
        out.se_c_full = std::sqrt(var_c / n);
        out.se_d_eff = std::sqrt(var_d / n);
    }
    return out;
}

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Theta: return "theta";
        case SweepAxis::Mass: return "m";
        case SweepAxis::Epsilon: return "epsilon";
        case SweepAxis::Gamma: return "gamma";
        case SweepAxis::Omega: return "omega";
    }
    return "";
}

std::string_view to_string(SweepMode m) {
    switch (m) {
        case SweepMode::Analytic: return "analytic";
        case SweepMode::Numeric: return "numeric";
        case SweepMode::Both: return "both";
    }
    return "";
}

std::optional<SweepAxis> sweep_axis_from_name(std::string_view name) {
    for (SweepAxis a : {SweepAxis::Theta, SweepAxis::Mass, SweepAxis::Epsilon, SweepAxis::Gamma, SweepAxis::Omega}) {
        if (to_string(a) == name) return a;
    }
    return std::nullopt;
}

std::optional<SweepMode> sweep_mode_from_name(std::string_view name) {
    for (SweepMode m : {SweepMode::Analytic, SweepMode::Numeric, SweepMode::Both}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

PhysicalParams with_axis_value(const PhysicalParams& p, SweepAxis axis, double value) {
    PhysicalParams q = p;
    switch (axis) {
        case SweepAxis::Theta: q.theta = value; break;
        case SweepAxis::Mass:
            if (!(value > 0.0)) throw DomainError("m must be positive");
            q.epsilon = p.epsilon * (value / p.mass);
            q.mass = value;
            break;
        case SweepAxis::Epsilon: q.epsilon = value; break;
        case SweepAxis::Gamma: q.gamma = value; break;
        case SweepAxis::Omega: q.omega = value; break;
    }
    q.validate();
    return q;
}

SweepTable sweep(const PhysicalParams& p, SweepAxis axis, const std::vector<double>& values, SweepMode mode,
                 int fock_dim, const IntegratorConfig& config, Complex alpha) {
    if (values.empty()) throw DomainError("sweep needs at least one value");
    SweepTable table;
    table.axis = axis;
    table.mode = mode;
    table.rows.resize(values.size());
    const bool numeric = mode != SweepMode::Analytic;
    const double nan = std::numeric_limits<double>::quiet_NaN();

#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < values.size(); ++i) {
        SweepRow& row = table.rows[i];
        row.axis_value = values[i];
        row.d01_analytic = nan;
        row.d_eff_numeric = nan;
        row.c_full = nan;
        try {
            const PhysicalParams q = with_axis_value(p, axis, values[i]);
            row.epsilon = q.epsilon;
            const DimensionlessDesign d = design_summary(q);
            row.d01_analytic = d.d01;
            row.feasibility = feasibility(d, q);
            if (numeric) {
                const SpaceDescriptor space = build_space(fock_dim, q.mass, q.omega, q.units);
                const ProtocolResult r = run_single({alpha}, q, space, config);
                row.d_eff_numeric = r.d_eff;
                row.c_full = r.c_full;
            }
        } catch (const Error& e) {
            row.error = std::string(to_string(e.kind())) + ": " + e.what();
        } catch (const std::exception& e) {
            row.error = std::string("internal: ") + e.what();
        }
    }
    return table;
}

}  // namespace cohprobe
