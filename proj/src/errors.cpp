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

#include "cohprobe/errors.hpp"

namespace cohprobe {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Truncation: return "truncation";
        case ErrorKind::Integrator: return "integrator";
        case ErrorKind::Infeasible: return "infeasible";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Domain: return 2;
        case ErrorKind::Truncation: return 3;
        case ErrorKind::Integrator: return 4;
        case ErrorKind::Infeasible: return 5;
    }
    return 1;
}

}  // namespace cohprobe
