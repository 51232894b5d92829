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

#include "erasure/pauli_sim.h"

#include <algorithm>
#include <iterator>

#include "json.hpp"

namespace erasure {

PauliFrame& PauliFrame::operator^=(const PauliFrame& other) {
    for (size_t i = 0; i < bits_.size(); i++) {
        bits_[i] ^= other.bits_[i];
    }
    return *this;
}

void propagate(PauliFrame& frame, GateKind gate, uint32_t a, uint32_t b) {
    uint8_t& fa = frame.bits_[a];
    uint8_t& fb = frame.bits_[b];
    if (gate == GateKind::CNOT) {
        fb ^= fa & 1;          // X on control spreads to target
        fa ^= fb & 2;          // Z on target spreads to control
    } else {
        uint8_t za = static_cast<uint8_t>((fb & 1) << 1);
        uint8_t zb = static_cast<uint8_t>((fa & 1) << 1);
        fa ^= za;
        fb ^= zb;
    }
}

std::vector<uint32_t> SyndromeTrial::defects() const {
    std::vector<uint32_t> out;
    for (size_t i = 0; i < detectors.size(); i++) {
        if (detectors[i]) {
            out.push_back(static_cast<uint32_t>(i));
        }
    }
    return out;
}

namespace {

// Runs rounds [start_round, rounds] with dense fault arrays and writes raw
// syndrome bits. Returns the logical flip mask of the residual data frame.
uint8_t simulate_dense(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout,
                       const std::vector<uint8_t>& gate_paulis, const std::vector<uint8_t>& spam_flags,
                       int start_round, std::vector<uint8_t>& raw) {
    const size_t na = layout.num_ancilla;
    PauliFrame frame(lattice.num_qubits());
    raw.assign(static_cast<size_t>(layout.rounds + 1) * na, 0);
    for (int r = start_round; r <= layout.rounds; r++) {
        const bool noisy = r < layout.rounds;
        const size_t spam_base = static_cast<size_t>(r) * 2 * na;
        for (uint32_t a = 0; a < na; a++) {
            frame.set(lattice.ancilla_qubit(a), noisy && spam_flags[spam_base + a] ? Pauli::Z : Pauli::I);
        }
        for (int k = 1; k <= 4; k++) {
            const auto& gates = schedule.steps[k].gates;
            uint32_t loc = noisy ? layout.step_offsets[static_cast<size_t>(r) * 4 + (k - 1)] : 0;
            for (size_t g = 0; g < gates.size(); g++) {
                const uint32_t aq = lattice.ancilla_qubit(gates[g].ancilla);
                propagate(frame, gates[g].kind, aq, gates[g].data);
                if (noisy) {
                    uint8_t pi = gate_paulis[loc + g];
                    if (pi) {
                        frame.apply(aq, static_cast<Pauli>(pi & 3));
                        frame.apply(gates[g].data, static_cast<Pauli>(pi >> 2));
                    }
                }
            }
        }
        for (uint32_t a = 0; a < na; a++) {
            uint8_t bit = frame.z(lattice.ancilla_qubit(a)) ? 1 : 0;
            if (noisy && spam_flags[spam_base + na + a]) {
                bit ^= 1;
            }
            raw[static_cast<size_t>(r) * na + a] = bit;
        }
    }
    uint8_t mask = 0;
    for (int c = 0; c < 2; c++) {
        const auto& lp = lattice.logicals[c].paulis;
        bool parity = false;
        for (uint32_t q = 0; q < lattice.num_data(); q++) {
            parity ^= anticommutes(frame.get(q), lp[q]);
        }
        if (parity) {
            mask |= static_cast<uint8_t>(1 << c);
        }
    }
    return mask;
}

void difference_in_time(const std::vector<uint8_t>& raw, size_t na, std::vector<uint8_t>& det) {
    det.resize(raw.size());
    for (size_t i = 0; i < raw.size(); i++) {
        det[i] = i < na ? raw[i] : static_cast<uint8_t>(raw[i] ^ raw[i - na]);
    }
}

}  // namespace

SyndromeTrial simulate_faults(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout,
                              const TrialFaults& faults) {
    std::vector<uint8_t> gate_paulis(layout.gates.size(), 0);
    std::vector<uint8_t> spam_flags(layout.spam.size(), 0);
    for (const auto& f : faults.gate_faults) {
        gate_paulis.at(f.location) ^= f.pauli.index();
    }
    for (uint32_t s : faults.spam_flips) {
        spam_flags.at(s) ^= 1;
    }
    SyndromeTrial t;
    t.rounds = layout.rounds;
    t.num_ancilla = layout.num_ancilla;
    t.logical_flips = simulate_dense(lattice, schedule, layout, gate_paulis, spam_flags, 0, t.raw);
    difference_in_time(t.raw, layout.num_ancilla, t.detectors);
    t.erasures = faults.erasures;
    return t;
}

SyndromeTrial run_trial(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout,
                        const NoiseConfig& cfg, Rng& rng) {
    TrialFaults faults;
    sample_trial_faults(cfg, layout, rng, faults);
    return simulate_faults(lattice, schedule, layout, faults);
}

SyndromeTrial run_trial(const Lattice& lattice, const Schedule& schedule, const NoiseConfig& cfg, Rng& rng) {
    CircuitLayout layout = CircuitLayout::build(lattice, schedule, lattice.distance);
    return run_trial(lattice, schedule, layout, cfg, rng);
}

FaultEffect combine(const FaultEffect& a, const FaultEffect& b) {
    FaultEffect out;
    std::set_symmetric_difference(a.detectors.begin(), a.detectors.end(), b.detectors.begin(), b.detectors.end(),
                                  std::back_inserter(out.detectors));
    out.logical_mask = a.logical_mask ^ b.logical_mask;
    return out;
}

FaultEffectTable::FaultEffectTable(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout) {
    const size_t ng = layout.gates.size();
    const size_t na = layout.num_ancilla;
    std::vector<uint8_t> gate_paulis(ng, 0);
    std::vector<uint8_t> spam_flags(layout.spam.size(), 0);
    std::vector<uint8_t> raw;
    std::vector<uint8_t> det;
    auto record = [&](int start_round, uint8_t mask) {
        FaultEffect e;
        difference_in_time(raw, na, det);
        for (size_t i = static_cast<size_t>(start_round) * na; i < det.size(); i++) {
            if (det[i]) {
                e.detectors.push_back(static_cast<uint32_t>(i));
            }
        }
        e.logical_mask = mask;
        return e;
    };

    components_.resize(ng * 4);
    for (uint32_t loc = 0; loc < ng; loc++) {
        const int r = static_cast<int>(layout.gates[loc].round);
        static constexpr uint8_t kComponents[4] = {1, 2, 4, 8};
        for (int c = 0; c < 4; c++) {
            gate_paulis[loc] = kComponents[c];
            uint8_t mask = simulate_dense(lattice, schedule, layout, gate_paulis, spam_flags, r, raw);
            components_[loc * 4 + c] = record(r, mask);
        }
        gate_paulis[loc] = 0;
    }
    gate_effects_.resize(ng * 16);
    for (uint32_t loc = 0; loc < ng; loc++) {
        for (uint8_t i = 1; i < 16; i++) {
            FaultEffect e;
            for (int c = 0; c < 4; c++) {
                if (i & (1 << c)) {
                    e = combine(e, components_[loc * 4 + c]);
                }
            }
            gate_effects_[loc * 16 + i] = std::move(e);
        }
    }
    spam_effects_.resize(layout.spam.size());
    for (uint32_t s = 0; s < layout.spam.size(); s++) {
        const int r = static_cast<int>(layout.spam[s].round);
        spam_flags[s] = 1;
        uint8_t mask = simulate_dense(lattice, schedule, layout, gate_paulis, spam_flags, r, raw);
        spam_effects_[s] = record(r, mask);
        spam_flags[s] = 0;
    }
}

uint8_t FaultEffectTable::accumulate(const TrialFaults& faults, std::vector<uint8_t>& flags,
                                     std::vector<uint32_t>& touched) const {
    uint8_t mask = 0;
    auto apply = [&](const FaultEffect& e) {
        for (uint32_t d : e.detectors) {
            flags[d] ^= 1;
            if (flags[d]) {
                touched.push_back(d);
            }
        }
        mask ^= e.logical_mask;
    };
    for (const auto& f : faults.gate_faults) {
        apply(gate_effects_[f.location * 16 + f.pauli.index()]);
    }
    for (uint32_t s : faults.spam_flips) {
        apply(spam_effects_[s]);
    }
    return mask;
}

void write_trial_json(std::ostream& out, uint64_t trial_index, const SyndromeTrial& trial) {
    nlohmann::json j;
    j["trial"] = trial_index;
    j["rounds"] = trial.rounds;
    j["defects"] = trial.defects();
    nlohmann::json er = nlohmann::json::array();
    for (size_t i = 0; i < trial.erasures.size(); i++) {
        er.push_back({{"location", trial.erasures.locations[i]}, {"replacement", trial.erasures.replacements[i].str()}});
    }
    j["erasures"] = er;
    j["logical_flips"] = trial.logical_flips;
    out << j.dump() << '\n';
}

}  // namespace erasure
