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

#include "cohprobe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cohprobe/errors.hpp"

namespace cohprobe {

void IntegratorConfig::validate() const {
    if (steps_per_period < 100) throw DomainError("steps_per_period must be >= 100");
    if (!(trace_tolerance > 0.0)) throw DomainError("trace_tolerance must be positive");
    if (!(leak_threshold > 0.0)) throw DomainError("leak_threshold must be positive");
    if (record_stride < 1) throw DomainError("record_stride must be >= 1");
}

std::string_view to_string(DissipatorKind k) {
    return k == DissipatorKind::QuantumOptical ? "quantum-optical" : "caldeira-leggett";
}

std::string_view to_string(KernelKind k) { return k == KernelKind::Banded ? "banded" : "dense-reference"; }

std::optional<DissipatorKind> dissipator_from_name(std::string_view name) {
    if (name == "quantum-optical") return DissipatorKind::QuantumOptical;
    if (name == "caldeira-leggett") return DissipatorKind::CaldeiraLeggett;
    return std::nullopt;
}

std::optional<KernelKind> kernel_from_name(std::string_view name) {
    if (name == "banded") return KernelKind::Banded;
    if (name == "dense-reference") return KernelKind::DenseReference;
    return std::nullopt;
}

CompositeOperator build_hamiltonian(const PhysicalParams& p, const SpaceDescriptor& space) {
    p.validate();
    const int n = space.fock_dim;
    Matrix h = Matrix::Zero(2 * n, 2 * n);
    h.block(0, 0, n, n) = branch_hamiltonian(0, p, space);
    h.block(n, n, n, n) = branch_hamiltonian(1, p, space);
    return CompositeOperator(std::move(h), true);
}

Matrix master_equation_rhs(const CompositeDensity& rho, const PhysicalParams& p, const SpaceDescriptor& space,
                           const IntegratorConfig& config) {
    if (rho.total_dim() != space.total_dim()) throw DomainError("density dimension does not match space");
    if (config.kernel == KernelKind::DenseReference) {
        return rhs_reference(rho.matrix(), p, space, config.dissipator);
    }
    Matrix out;
    Liouvillian(p, space, config.dissipator).apply(rho.matrix(), out);
    return out;
}

ObservableSample observe(const CompositeDensity& rho, const SpaceDescriptor& space) {
    const int n = space.fock_dim;
    const Matrix& m = rho.matrix();
    ObservableSample s;
    s.time = rho.time();
    s.coherence = 2.0 * std::abs(rho.block(0, 1).trace());
    const Complex t00 = rho.block(0, 0).trace();
    const Complex t11 = rho.block(1, 1).trace();
    s.sigma_z = (t00 - t11).real();

    Complex a_mean(0.0);
    for (int q = 0; q < 2; ++q) {
        const int o = q * n;
        for (int k = 0; k + 1 < n; ++k) a_mean += std::sqrt(k + 1.0) * m(o + k + 1, o + k);
    }
    s.x_mean = 2.0 * space.delta_x * a_mean.real();
    s.p_mean = 2.0 * space.delta_p * a_mean.imag();
    s.purity = purity(m);
    s.trace_dev = (t00 + t11).real() - 1.0;
    s.top_fock_pop = m(n - 1, n - 1).real() + m(2 * n - 1, 2 * n - 1).real();
    return s;
}

Trajectory evolve(const CompositeDensity& rho0, double t_end, const PhysicalParams& p, const SpaceDescriptor& space,
                  const IntegratorConfig& config) {
    config.validate();
    p.validate();
    if (rho0.total_dim() != space.total_dim()) throw DomainError("initial state dimension does not match space");
    const double t0 = rho0.time();
    const double duration = t_end - t0;
    if (!(duration > 0.0)) throw DomainError("t_end must lie after the initial state's time");

    const double period = p.period();
    const double dt_nominal = period / config.steps_per_period;
    const long steps = std::max(1L, static_cast<long>(std::ceil(duration / dt_nominal - 1e-9)));
    const double dt = duration / static_cast<double>(steps);
    const int n = space.fock_dim;

    std::optional<Liouvillian> gen;
    if (config.kernel == KernelKind::Banded) gen.emplace(p, space, config.dissipator);
    auto rhs = [&](const Matrix& r, Matrix& out) {
        if (gen) {
            gen->apply(r, out);
        } else {
            out = rhs_reference(r, p, space, config.dissipator);
        }
    };

    Trajectory traj;
    traj.params = p;
    traj.config = config;
    traj.steps = steps;
    traj.dt = dt;

    CompositeDensity state(rho0.matrix(), t0);
    auto record = [&]() {
        TrajectoryPoint pt{observe(state, space), std::nullopt};
        if (config.store_states) pt.state = state;
        traj.points.push_back(std::move(pt));
    };
    record();

    const double trace0 = state.trace().real();
    Matrix& rho = state.matrix();
    Matrix k1(2 * n, 2 * n), k2(2 * n, 2 * n), k3(2 * n, 2 * n), k4(2 * n, 2 * n), stage(2 * n, 2 * n);

    for (long step = 1; step <= steps; ++step) {
        rhs(rho, k1);
        stage = rho + (0.5 * dt) * k1;
        rhs(stage, k2);
        stage = rho + (0.5 * dt) * k2;
        rhs(stage, k3);
        stage = rho + dt * k3;
        rhs(stage, k4);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        stage = rho.adjoint();
        rho = 0.5 * (rho + stage);
        state.set_time(step == steps ? t_end : t0 + step * dt);

        const double tr = rho.trace().real();
        const double drift = std::abs(tr - trace0);
        const double allowed = config.trace_tolerance * std::max(1.0, (state.time() - t0) / period);
        if (!std::isfinite(tr) || drift > allowed) {
            std::ostringstream os;
            os << "trace drift " << drift << " exceeds " << allowed << " at step " << step;
            throw IntegratorError(os.str(), step, drift);
        }
        const double top = rho(n - 1, n - 1).real() + rho(2 * n - 1, 2 * n - 1).real();
        if (top > config.leak_threshold) {
            std::ostringstream os;
            os << "top Fock level population " << top << " exceeds " << config.leak_threshold << " at step " << step
               << "; increase fock_dim";
            throw TruncationError(os.str(), top, step);
        }
        if (step % config.record_stride == 0 || step == steps) record();
    }
    traj.final_state = std::move(state);
    return traj;
}

double ObservableSeries::sigma_z_drift() const {
    if (samples.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                        [](const auto& a, const auto& b) { return a.sigma_z < b.sigma_z; });
    return hi->sigma_z - lo->sigma_z;
}

ObservableSeries trajectory_observables(const Trajectory& traj) {
    if (traj.points.empty()) throw DomainError("trajectory has no samples");
    ObservableSeries series;
    series.samples.reserve(traj.points.size());
    for (const auto& pt : traj.points) series.samples.push_back(pt.sample);
    return series;
}

}  // namespace cohprobe
