// Copyright 2026 The erasure-qec Authors
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

#ifndef ERASURE_CIRCUIT_H
#define ERASURE_CIRCUIT_H

#include <array>
#include <cstdint>
#include <vector>

#include "erasure/code_model.h"

namespace erasure {

struct GateLocation {
    uint32_t round;
    uint8_t step;  // 1..4
    uint32_t ancilla;
    uint32_t data;
    GateKind kind;
};

enum class SpamKind : uint8_t { Prepare, Measure };

struct SpamLocation {
    uint32_t round;
    uint32_t ancilla;
    SpamKind kind;
};

/// Flattened, time-ordered fault locations of the noisy rounds. The trailing
/// perfect round carries no locations.
struct CircuitLayout {
    int rounds = 0;
    size_t num_data = 0;
    size_t num_ancilla = 0;
    std::vector<GateLocation> gates;
    std::vector<SpamLocation> spam;
    /// Gate location ids split by GateKind (index 0: CZ, 1: CNOT).
    std::array<std::vector<uint32_t>, 2> gates_by_kind;
    /// Location id of the first gate of each (round, step), plus a final sentinel.
    std::vector<uint32_t> step_offsets;

    size_t num_detectors() const { return static_cast<size_t>(rounds + 1) * num_ancilla; }
    uint32_t detector(uint32_t round, uint32_t ancilla) const {
        return static_cast<uint32_t>(round * num_ancilla + ancilla);
    }

    static CircuitLayout build(const Lattice& lattice, const Schedule& schedule, int rounds);
};

}  // namespace erasure

#endif
