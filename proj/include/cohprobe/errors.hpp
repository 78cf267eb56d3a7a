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

#include <stdexcept>
#include <string>

namespace cohprobe {

enum class ErrorKind { Config, Domain, Truncation, Integrator, Infeasible };

const char* to_string(ErrorKind kind);

/// Process exit code for an error kind: config/domain=2, truncation=3,
/// integrator=4, infeasible=5.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Bad configuration: unknown key, type mismatch, conflicting flags.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// A parameter outside its physical domain, or mismatched dimensions.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// The Fock truncation cannot represent the requested state.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double magnitude, long step = -1)
        : Error(ErrorKind::Truncation, what), magnitude_(magnitude), step_(step) {}
    double magnitude() const noexcept { return magnitude_; }
    long step() const noexcept { return step_; }

private:
    double magnitude_;
    long step_;
};

class IntegratorError : public Error {
public:
    IntegratorError(const std::string& what, long step, double magnitude)
        : Error(ErrorKind::Integrator, what), step_(step), magnitude_(magnitude) {}
    long step() const noexcept { return step_; }
    double magnitude() const noexcept { return magnitude_; }

private:
    long step_;
    double magnitude_;
};

/// The requested design cannot be simulated at the configured truncation.
class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what) : Error(ErrorKind::Infeasible, what) {}
};

}  // namespace cohprobe
