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

#ifndef ERASURE_DECODING_GRAPH_H
#define ERASURE_DECODING_GRAPH_H

#include <cstdint>
#include <string>
#include <vector>

#include "erasure/circuit.h"
#include "erasure/code_model.h"
#include "erasure/noise.h"
#include "erasure/pauli_sim.h"
#include "json.hpp"

namespace erasure {

/// Weight of an edge that only heralded faults can produce.
inline constexpr int kHeraldedOnlyWeight = 1 << 16;

struct GraphEdge {
    uint32_t u;
    uint32_t v;  // may be a boundary vertex
    int weight;
    double p_max;  // largest unheralded single-mechanism probability
    uint8_t logical_mask;
    uint32_t mechanisms = 0;
};

/// Space-time decoding graph. Vertices [0, num_detectors) are detectors
/// (round * num_ancilla + ancilla); the remaining vertices are virtual boundary nodes,
/// one per distinct (detector, logical mask) boundary edge.
struct DecodingGraph {
    int rounds = 0;
    size_t num_ancilla = 0;
    size_t num_detectors = 0;
    size_t num_vertices = 0;
    std::vector<GraphEdge> edges;
    std::vector<uint32_t> incident_offsets;  // CSR
    std::vector<uint32_t> incident_edges;
    /// Edges touched by any fault at each gate location.
    std::vector<std::vector<uint32_t>> location_edges;
    std::vector<std::string> diagnostics;

    bool is_boundary(uint32_t v) const { return v >= num_detectors; }
    uint32_t other(uint32_t e, uint32_t v) const { return edges[e].u == v ? edges[e].v : edges[e].u; }
    size_t degree(uint32_t v) const { return incident_offsets[v + 1] - incident_offsets[v]; }
};

int edge_weight(double p_max);

/// Splits a fault effect into its parts on each class of checks. Throws if a part
/// would need a hyperedge.
std::vector<FaultEffect> class_parts(const Lattice& lattice, const FaultEffect& effect);

DecodingGraph build_graph(const Lattice& lattice, const CircuitLayout& layout, const FaultEffectTable& table,
                          const NoiseConfig& cfg);
/// Convenience form that builds the circuit layout and effect table for `rounds`
/// noisy rounds (0 means the code distance).
DecodingGraph build_graph(const Lattice& lattice, const Schedule& schedule, const NoiseConfig& cfg, int rounds = 0);

/// Finds the edge matching a one- or two-detector effect part, or -1.
int64_t find_edge(const DecodingGraph& graph, const FaultEffect& part);

struct ErasureOverlay {
    std::vector<uint32_t> edges;  // sorted, unique
};

ErasureOverlay overlay_erasures(const DecodingGraph& graph, const ErasureRecord& record);
ErasureOverlay overlay_erasures(const DecodingGraph& graph, const std::vector<uint32_t>& locations);

nlohmann::json graph_to_json(const DecodingGraph& graph);

}  // namespace erasure

#endif
