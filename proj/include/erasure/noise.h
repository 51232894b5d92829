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

#ifndef ERASURE_NOISE_H
#define ERASURE_NOISE_H

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "erasure/circuit.h"
#include "erasure/code_model.h"
#include "erasure/rng.h"

namespace erasure {

enum class NoiseMode : uint8_t { Erasure, Biased };

struct NoiseConfig {
    double p = 0.0;
    double erasure_fraction = 0.0;  // R_e
    double p_m = 0.0;
    /// When set, init/measurement errors occur with probability p instead of p_m.
    bool p_m_tracks_p = false;
    NoiseMode mode = NoiseMode::Erasure;
    double eta = std::numeric_limits<double>::infinity();
    uint64_t seed = 0;

    double p_erasure() const { return p * erasure_fraction; }
    double p_pauli() const { return p - p_erasure(); }
    double spam_probability() const { return p_m_tracks_p ? p : p_m; }
    void validate() const;
};

/// Two-qubit Pauli. `first` acts on the ancilla (the control of a CNOT), `second`
/// on the data qubit.
struct TwoQubitPauli {
    Pauli first = Pauli::I;
    Pauli second = Pauli::I;

    /// Index in 0..15, first | second << 2.
    uint8_t index() const { return static_cast<uint8_t>(first) | static_cast<uint8_t>(second) << 2; }
    static TwoQubitPauli from_index(uint8_t i) { return {static_cast<Pauli>(i & 3), static_cast<Pauli>(i >> 2)}; }
    bool is_identity() const { return first == Pauli::I && second == Pauli::I; }
    bool operator==(const TwoQubitPauli&) const = default;
    std::string str() const;
};

enum class FaultKind : uint8_t { None, Pauli, Erasure };

struct GateErrorEvent {
    FaultKind kind = FaultKind::None;
    TwoQubitPauli pauli;
    uint32_t location = 0;
};

struct ErasureRecord {
    std::vector<uint32_t> locations;
    std::vector<TwoQubitPauli> replacements;
    /// (round, ancilla) pairs whose measurement outcome is random.
    std::vector<std::pair<uint32_t, uint32_t>> random_outcomes;

    size_t size() const { return locations.size(); }
    void clear() {
        locations.clear();
        replacements.clear();
        random_outcomes.clear();
    }
};

/// One gate fault after erasure replacement has been resolved into a Pauli.
struct AppliedFault {
    uint32_t location;
    TwoQubitPauli pauli;
};

/// All faults of one trial.
struct TrialFaults {
    std::vector<AppliedFault> gate_faults;
    std::vector<uint32_t> spam_flips;  // indices into CircuitLayout::spam
    ErasureRecord erasures;

    void clear() {
        gate_faults.clear();
        spam_flips.clear();
        erasures.clear();
    }
};

GateErrorEvent sample_gate_error(const NoiseConfig& cfg, Rng& rng);

TwoQubitPauli apply_erasure_replacement(const GateErrorEvent& event, const GateLocation& where, Rng& rng,
                                        ErasureRecord& record);

bool sample_spam_error(const NoiseConfig& cfg, Rng& rng);

GateErrorEvent sample_biased_gate_error(const NoiseConfig& cfg, GateKind kind, Rng& rng);

/// Probability of each of the 16 two-qubit Paulis (index 0 is the identity) for a
/// gate of the given kind under an unheralded Pauli channel.
std::array<double, 16> pauli_channel(const NoiseConfig& cfg, GateKind kind);

/// Samples every fault of one trial. Gates are visited with geometric skipping, so
/// the cost scales with the number of faults rather than the number of locations.
void sample_trial_faults(const NoiseConfig& cfg, const CircuitLayout& layout, Rng& rng, TrialFaults& out);

}  // namespace erasure

#endif
