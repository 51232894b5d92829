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

#include "erasure/code_model.h"

#include <stdexcept>

namespace erasure {

char pauli_char(Pauli p) { return "IXZY"[static_cast<uint8_t>(p)]; }

void CodeConfig::validate() const {
    if (distance < 3 || distance % 2 == 0) {
        throw std::invalid_argument("distance must be an odd integer >= 3, got " + std::to_string(distance));
    }
    if (rounds < 0) {
        throw std::invalid_argument("rounds must be positive");
    }
}

std::vector<Pauli> Lattice::stabilizer_paulis(size_t a) const {
    std::vector<Pauli> out(num_data(), Pauli::I);
    for (const auto& leg : stabilizers.at(a).legs) {
        out[leg.data] = leg.basis;
    }
    return out;
}

namespace {

bool plaquette_exists(int d, int r, int c) {
    bool row_bulk = r >= 0 && r <= d - 2;
    bool col_bulk = c >= 0 && c <= d - 2;
    if (row_bulk && col_bulk) {
        return true;
    }
    // Weight-2 checks: class-0 along top/bottom, class-1 along left/right.
    if (col_bulk && r == -1) {
        return c % 2 == 1;
    }
    if (col_bulk && r == d - 1) {
        return c % 2 == 0;
    }
    if (row_bulk && c == -1) {
        return r % 2 == 0;
    }
    if (row_bulk && c == d - 1) {
        return r % 2 == 1;
    }
    return false;
}

}  // namespace

Lattice build_lattice(const CodeConfig& config) {
    config.validate();
    const int d = config.distance;
    Lattice lat;
    lat.distance = d;
    for (int r = 0; r < d; r++) {
        for (int c = 0; c < d; c++) {
            lat.data_coords.push_back({r, c});
        }
    }
    for (int r = -1; r < d; r++) {
        for (int c = -1; c < d; c++) {
            if (!plaquette_exists(d, r, c)) {
                continue;
            }
            Stabilizer s;
            s.row = r;
            s.col = c;
            s.check_class = ((r + c) % 2 + 2) % 2;
            const std::array<std::array<int, 2>, 4> offsets{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};
            for (int k = 0; k < 4; k++) {
                int qr = r + offsets[k][0];
                int qc = c + offsets[k][1];
                if (qr < 0 || qr >= d || qc < 0 || qc >= d) {
                    continue;
                }
                auto corner = static_cast<Corner>(k);
                // X on the NW-SE diagonal, Z on the NE-SW diagonal.
                Pauli basis = (corner == Corner::NW || corner == Corner::SE) ? Pauli::X : Pauli::Z;
                s.legs.push_back({lat.data_index(qr, qc), basis, corner});
            }
            lat.stabilizers.push_back(std::move(s));
        }
    }

    // Column 0 and row 0 strings. Alternation follows the XZZX checkerboard.
    LogicalOperator column{"X_L", std::vector<Pauli>(lat.num_data(), Pauli::I)};
    LogicalOperator row{"Z_L", std::vector<Pauli>(lat.num_data(), Pauli::I)};
    for (int k = 0; k < d; k++) {
        column.paulis[lat.data_index(k, 0)] = (k % 2 == 0) ? Pauli::X : Pauli::Z;
        row.paulis[lat.data_index(0, k)] = (k % 2 == 0) ? Pauli::Z : Pauli::X;
    }
    lat.logicals = {std::move(column), std::move(row)};
    lat.boundary_class[static_cast<int>(Side::Top)] = 0;
    lat.boundary_class[static_cast<int>(Side::Bottom)] = 0;
    lat.boundary_class[static_cast<int>(Side::Left)] = 1;
    lat.boundary_class[static_cast<int>(Side::Right)] = 1;
    return lat;
}

std::array<Corner, 4> corner_order(GateOrder order, int check_class) {
    if (order == GateOrder::HookAligned && check_class == 1) {
        return {Corner::NW, Corner::SW, Corner::NE, Corner::SE};
    }
    return {Corner::NW, Corner::NE, Corner::SW, Corner::SE};
}

size_t Schedule::gates_per_round() const {
    size_t n = 0;
    for (const auto& s : steps) {
        n += s.gates.size();
    }
    return n;
}

Schedule build_schedule(const Lattice& lattice, GateOrder order) {
    Schedule sched;
    sched.order = order;
    sched.steps[0].kind = StepKind::Prepare;
    sched.steps[5].kind = StepKind::Measure;
    for (int k = 0; k < 4; k++) {
        auto& step = sched.steps[k + 1];
        step.kind = StepKind::Gates;
        for (size_t a = 0; a < lattice.num_ancilla(); a++) {
            const auto& stab = lattice.stabilizers[a];
            Corner want = corner_order(order, stab.check_class)[k];
            for (const auto& leg : stab.legs) {
                if (leg.corner == want) {
                    GateKind kind = leg.basis == Pauli::X ? GateKind::CNOT : GateKind::CZ;
                    step.gates.push_back({static_cast<uint32_t>(a), leg.data, kind});
                }
            }
        }
    }
    return sched;
}

nlohmann::json lattice_to_json(const Lattice& lattice) {
    nlohmann::json j;
    j["distance"] = lattice.distance;
    j["data"] = nlohmann::json::array();
    for (size_t q = 0; q < lattice.num_data(); q++) {
        j["data"].push_back({{"id", q}, {"row", lattice.data_coords[q][0]}, {"col", lattice.data_coords[q][1]}});
    }
    const char* corners[] = {"NW", "NE", "SW", "SE"};
    j["ancillas"] = nlohmann::json::array();
    for (size_t a = 0; a < lattice.num_ancilla(); a++) {
        const auto& s = lattice.stabilizers[a];
        nlohmann::json legs = nlohmann::json::array();
        for (const auto& leg : s.legs) {
            legs.push_back({{"data", leg.data},
                            {"basis", std::string(1, pauli_char(leg.basis))},
                            {"corner", corners[static_cast<int>(leg.corner)]}});
        }
        // Plaquette centre sits half a site below-right of its anchor.
        j["ancillas"].push_back({{"id", a},
                                 {"row", s.row + 0.5},
                                 {"col", s.col + 0.5},
                                 {"class", s.check_class},
                                 {"legs", legs}});
    }
    for (const auto& op : lattice.logicals) {
        std::string str;
        for (Pauli p : op.paulis) {
            str += pauli_char(p);
        }
        j["logicals"][op.name] = str;
    }
    return j;
}

nlohmann::json schedule_to_json(const Schedule& schedule) {
    nlohmann::json j;
    j["order"] = schedule.order == GateOrder::HookAligned ? "hook_aligned" : "uniform_z";
    j["steps"] = nlohmann::json::array();
    for (const auto& step : schedule.steps) {
        nlohmann::json s;
        switch (step.kind) {
            case StepKind::Prepare: s["kind"] = "prepare_plus"; break;
            case StepKind::Measure: s["kind"] = "measure_x"; break;
            case StepKind::Gates: s["kind"] = "gates"; break;
        }
        s["gates"] = nlohmann::json::array();
        for (const auto& g : step.gates) {
            s["gates"].push_back(
                {{"ancilla", g.ancilla}, {"data", g.data}, {"kind", g.kind == GateKind::CZ ? "CZ" : "CNOT"}});
        }
        j["steps"].push_back(std::move(s));
    }
    return j;
}

}  // namespace erasure
