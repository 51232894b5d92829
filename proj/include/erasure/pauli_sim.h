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

#ifndef ERASURE_PAULI_SIM_H
#define ERASURE_PAULI_SIM_H

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "erasure/circuit.h"
#include "erasure/code_model.h"
#include "erasure/noise.h"
#include "erasure/rng.h"

namespace erasure {

class PauliFrame {
   public:
    explicit PauliFrame(size_t num_qubits) : bits_(num_qubits, 0) {}

    size_t size() const { return bits_.size(); }
    Pauli get(uint32_t q) const { return static_cast<Pauli>(bits_[q]); }
    void set(uint32_t q, Pauli p) { bits_[q] = static_cast<uint8_t>(p); }
    void apply(uint32_t q, Pauli p) { bits_[q] ^= static_cast<uint8_t>(p); }
    bool x(uint32_t q) const { return (bits_[q] & 1) != 0; }
    bool z(uint32_t q) const { return (bits_[q] & 2) != 0; }
    void clear() { std::fill(bits_.begin(), bits_.end(), 0); }

    PauliFrame& operator^=(const PauliFrame& other);
    bool operator==(const PauliFrame&) const = default;

   private:
    friend void propagate(PauliFrame&, GateKind, uint32_t, uint32_t);
    std::vector<uint8_t> bits_;
};

/// Conjugates the frame through one gate. For CNOT `a` is the control.
void propagate(PauliFrame& frame, GateKind gate, uint32_t a, uint32_t b);

struct SyndromeTrial {
    int rounds = 0;  // noisy rounds; raw and detector matrices have rounds + 1 rows
    size_t num_ancilla = 0;
    std::vector<uint8_t> raw;
    std::vector<uint8_t> detectors;
    ErasureRecord erasures;
    /// Bit c is set when the residual data error anticommutes with logicals[c].
    uint8_t logical_flips = 0;

    uint8_t detector(size_t round, size_t ancilla) const { return detectors[round * num_ancilla + ancilla]; }
    std::vector<uint32_t> defects() const;
};

/// Executes the circuit with the given faults injected, by explicit frame propagation.
SyndromeTrial simulate_faults(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout,
                              const TrialFaults& faults);

SyndromeTrial run_trial(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout,
                        const NoiseConfig& cfg, Rng& rng);
SyndromeTrial run_trial(const Lattice& lattice, const Schedule& schedule, const NoiseConfig& cfg, Rng& rng);

struct FaultEffect {
    std::vector<uint32_t> detectors;  // sorted
    uint8_t logical_mask = 0;

    bool empty() const { return detectors.empty() && logical_mask == 0; }
    bool operator==(const FaultEffect&) const = default;
};

FaultEffect combine(const FaultEffect& a, const FaultEffect& b);

/// Detector and logical effect of every single fault, precomputed by propagating each
/// single-qubit X and Z component through the remainder of the circuit.
class FaultEffectTable {
   public:
    FaultEffectTable(const Lattice& lattice, const Schedule& schedule, const CircuitLayout& layout);

    /// Component 0..3: (ancilla X, ancilla Z, data X, data Z).
    const FaultEffect& component(uint32_t location, int comp) const { return components_[location * 4 + comp]; }
    const FaultEffect& gate_effect(uint32_t location, uint8_t pauli_index) const {
        return gate_effects_[location * 16 + pauli_index];
    }
    const FaultEffect& spam_effect(uint32_t spam_id) const { return spam_effects_[spam_id]; }
    size_t num_gate_locations() const { return components_.size() / 4; }
    size_t num_spam_locations() const { return spam_effects_.size(); }

    /// Toggles detector flags for the given faults. Newly set flags are appended to
    /// `touched`; returns the logical flip mask.
    uint8_t accumulate(const TrialFaults& faults, std::vector<uint8_t>& flags, std::vector<uint32_t>& touched) const;

   private:
    std::vector<FaultEffect> components_;
    std::vector<FaultEffect> gate_effects_;
    std::vector<FaultEffect> spam_effects_;
};

/// One line-delimited JSON record describing a trial.
void write_trial_json(std::ostream& out, uint64_t trial_index, const SyndromeTrial& trial);

}  // namespace erasure

#endif
