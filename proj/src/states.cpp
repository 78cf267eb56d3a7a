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

#include "cohprobe/states.hpp"

#include <cmath>
#include <sstream>

#include "cohprobe/errors.hpp"

namespace cohprobe {

bool truncation_adequate(double abs_alpha, int fock_dim) {
    return abs_alpha * abs_alpha + 3.0 * abs_alpha + 3.0 <= static_cast<double>(fock_dim);
}

namespace {

// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!) by recurrence, n < fock_dim.
Vector coherent_amplitudes(Complex alpha, int fock_dim) {
    Vector c(fock_dim);
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < fock_dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

}  // namespace

double coherent_norm_deficit(Complex alpha, int fock_dim) {
    // Summing the tail directly avoids cancellation in 1 - sum.
    const double mean = std::norm(alpha);
    if (mean == 0.0) return 0.0;
    double term = std::exp(-mean);
    for (int n = 1; n <= fock_dim; ++n) term *= mean / n;  // Poisson weight at n = fock_dim
    double tail = 0.0;
    for (int n = fock_dim; term > 0.0; ++n) {
        tail += term;
        term *= mean / (n + 1);
        if (term < tail * 1e-17) break;
    }
    return tail;
}

Vector coherent_state(const CoherentLabel& label, const SpaceDescriptor& space, double deficit_tolerance) {
    const double r = std::abs(label.alpha);
    const double deficit = coherent_norm_deficit(label.alpha, space.fock_dim);
    if (!truncation_adequate(r, space.fock_dim) || deficit > deficit_tolerance) {
        std::ostringstream os;
        os << "coherent state |alpha|=" << r << " not representable with fock_dim=" << space.fock_dim
           << " (norm deficit " << deficit << ")";
        throw TruncationError(os.str(), deficit);
    }
    Vector c = coherent_amplitudes(label.alpha, space.fock_dim);
    c /= c.norm();
    return c;
}

Matrix thermal_state(const ThermalSpec& spec, const SpaceDescriptor& space) {
    if (!(spec.nbar >= 0.0) || !std::isfinite(spec.nbar)) {
        throw DomainError("thermal nbar must be finite and non-negative");
    }
    const int n = space.fock_dim;
    Matrix rho = Matrix::Zero(n, n);
    if (spec.nbar == 0.0) {
        rho(0, 0) = 1.0;
        return rho;
    }
    const double ratio = spec.nbar / (spec.nbar + 1.0);
    const double tail = std::pow(ratio, n);  // weight beyond the truncation
    if (tail > 1e-6) {
        std::ostringstream os;
        os << "thermal state nbar=" << spec.nbar << " has tail weight " << tail << " beyond fock_dim=" << n;
        throw TruncationError(os.str(), tail);
    }
    double w = 1.0;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        rho(k, k) = w;
        total += w;
        w *= ratio;
    }
    rho /= total;
    return rho;
}

CoherentLabel sample_coherent_label(const ThermalSpec& spec, Rng& rng) {
    if (!(spec.nbar >= 0.0)) throw DomainError("thermal nbar must be non-negative");
    if (spec.nbar == 0.0) return {};
    // P(alpha) is a circular complex Gaussian with E|alpha|^2 = nbar.
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * spec.nbar));
    const double re = normal(rng);
    const double im = normal(rng);
    return {Complex(re, im)};
}

CoherentLabel sample_coherent_label(const ThermalSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    return sample_coherent_label(spec, rng);
}

CompositeDensity prepare_protocol_input(const OscillatorInit& init, const SpaceDescriptor& space) {
    const int n = space.fock_dim;
    Matrix rho_a;
    if (const auto* label = std::get_if<CoherentLabel>(&init)) {
        const Vector psi = coherent_state(*label, space);
        rho_a = psi * psi.adjoint();
    } else if (const auto* thermal = std::get_if<ThermalSpec>(&init)) {
        rho_a = thermal_state(*thermal, space);
    } else {
        rho_a = std::get<Matrix>(init);
        if (rho_a.rows() != n || rho_a.cols() != n) {
            throw DomainError("explicit oscillator density has wrong dimension");
        }
        if (std::abs(rho_a.trace() - 1.0) > 1e-8) throw DomainError("explicit oscillator density must have unit trace");
        if ((rho_a - rho_a.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
            throw DomainError("explicit oscillator density must be Hermitian");
        }
    }
    Matrix rho(2 * n, 2 * n);
    for (int q = 0; q < 2; ++q) {
        for (int qp = 0; qp < 2; ++qp) rho.block(q * n, qp * n, n, n) = 0.5 * rho_a;
    }
    return CompositeDensity(std::move(rho), 0.0);
}

}  // namespace cohprobe
