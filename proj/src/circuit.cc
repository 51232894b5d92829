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

#include "erasure/circuit.h"

#include <stdexcept>

namespace erasure {

CircuitLayout CircuitLayout::build(const Lattice& lattice, const Schedule& schedule, int rounds) {
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be >= 1");
    }
    CircuitLayout layout;
    layout.rounds = rounds;
    layout.num_data = lattice.num_data();
    layout.num_ancilla = lattice.num_ancilla();
    for (int r = 0; r < rounds; r++) {
        for (uint32_t a = 0; a < layout.num_ancilla; a++) {
            layout.spam.push_back({static_cast<uint32_t>(r), a, SpamKind::Prepare});
        }
        for (uint8_t k = 1; k <= 4; k++) {
            layout.step_offsets.push_back(static_cast<uint32_t>(layout.gates.size()));
            for (const auto& g : schedule.steps[k].gates) {
                auto id = static_cast<uint32_t>(layout.gates.size());
                layout.gates.push_back({static_cast<uint32_t>(r), k, g.ancilla, g.data, g.kind});
                layout.gates_by_kind[g.kind == GateKind::CZ ? 0 : 1].push_back(id);
            }
        }
        for (uint32_t a = 0; a < layout.num_ancilla; a++) {
            layout.spam.push_back({static_cast<uint32_t>(r), a, SpamKind::Measure});
        }
    }
    layout.step_offsets.push_back(static_cast<uint32_t>(layout.gates.size()));
    return layout;
}

}  // namespace erasure
