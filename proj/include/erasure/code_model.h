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

#ifndef ERASURE_CODE_MODEL_H
#define ERASURE_CODE_MODEL_H

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace erasure {

/// Single-qubit Pauli in symplectic form: bit 0 is the X component, bit 1 the Z component.
enum class Pauli : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline bool has_x(Pauli p) { return (static_cast<uint8_t>(p) & 1) != 0; }
inline bool has_z(Pauli p) { return (static_cast<uint8_t>(p) & 2) != 0; }
inline bool anticommutes(Pauli a, Pauli b) {
    return ((has_x(a) && has_z(b)) != (has_z(a) && has_x(b)));
}
char pauli_char(Pauli p);

enum class Corner : uint8_t { NW = 0, NE = 1, SW = 2, SE = 3 };
enum class GateKind : uint8_t { CZ, CNOT };
enum class Side : uint8_t { Top = 0, Bottom = 1, Left = 2, Right = 3 };

struct CodeConfig {
    int distance = 3;
    /// Noisy syndrome rounds; 0 means "same as distance".
    int rounds = 0;

    int num_rounds() const { return rounds > 0 ? rounds : distance; }
    void validate() const;
};

struct StabilizerLeg {
    uint32_t data;
    Pauli basis;  // X or Z
    Corner corner;
};

/// One plaquette check. Anchored at the data qubit that would sit at its NW corner;
/// boundary plaquettes have anchors at row or column -1.
struct Stabilizer {
    int row;
    int col;
    /// Checkerboard class (0 or 1). Every single-qubit error component flips checks of one class only.
    int check_class;
    std::vector<StabilizerLeg> legs;  // in corner order NW, NE, SW, SE, truncated at boundaries
};

struct LogicalOperator {
    std::string name;
    /// Pauli per data qubit (I where unsupported).
    std::vector<Pauli> paulis;
};

/// Planar XZZX patch: d x d data qubits, d^2 - 1 plaquette ancillas.
struct Lattice {
    int distance = 0;
    std::vector<std::array<int, 2>> data_coords;  // (row, col)
    std::vector<Stabilizer> stabilizers;          // index == ancilla index
    /// logicals[c] is the logical operator whose flips are detected by checks of class c.
    std::array<LogicalOperator, 2> logicals;
    /// Class of the weight-2 checks terminating on each side, indexed by Side.
    std::array<int, 4> boundary_class{};

    size_t num_data() const { return data_coords.size(); }
    size_t num_ancilla() const { return stabilizers.size(); }
    size_t num_qubits() const { return num_data() + num_ancilla(); }
    uint32_t ancilla_qubit(size_t a) const { return static_cast<uint32_t>(num_data() + a); }
    uint32_t data_index(int row, int col) const { return static_cast<uint32_t>(row * distance + col); }

    /// Stabilizer as a Pauli string over data qubits.
    std::vector<Pauli> stabilizer_paulis(size_t a) const;
};

Lattice build_lattice(const CodeConfig& config);

/// Ordering of the four legs inside a stabilizer measurement.
enum class GateOrder : uint8_t {
    /// Class 0 checks use NW,NE,SW,SE and class 1 checks use NW,SW,NE,SE, so the
    /// weight-2 hook left by a mid-cycle ancilla fault lies across the logical it could damage.
    HookAligned,
    /// NW,NE,SW,SE for every check.
    UniformZ,
};

enum class StepKind : uint8_t { Prepare, Gates, Measure };

struct ScheduledGate {
    uint32_t ancilla;  // ancilla index (not qubit index); control of CNOT
    uint32_t data;     // data qubit index; target of CNOT
    GateKind kind;
};

struct ScheduleStep {
    StepKind kind;
    std::vector<ScheduledGate> gates;  // empty for Prepare / Measure
};

/// One syndrome-extraction round: prepare all ancillas in |+>, four gate layers, measure all in X.
struct Schedule {
    GateOrder order = GateOrder::HookAligned;
    std::array<ScheduleStep, 6> steps;

    size_t gates_per_round() const;
};

Schedule build_schedule(const Lattice& lattice, GateOrder order = GateOrder::HookAligned);

std::array<Corner, 4> corner_order(GateOrder order, int check_class);

nlohmann::json lattice_to_json(const Lattice& lattice);
nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace erasure

#endif
