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

#include "erasure/decoding_graph.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace erasure {

int edge_weight(double p_max) {
    if (p_max <= 0.0) {
        return kHeraldedOnlyWeight;
    }
    return std::max(1, static_cast<int>(std::lround(-std::log(p_max))));
}

std::vector<FaultEffect> class_parts(const Lattice& lattice, const FaultEffect& effect) {
    const size_t na = lattice.num_ancilla();
    std::vector<FaultEffect> parts;
    for (int c = 0; c < 2; c++) {
        FaultEffect part;
        for (uint32_t d : effect.detectors) {
            if (lattice.stabilizers[d % na].check_class == c) {
                part.detectors.push_back(d);
            }
        }
        part.logical_mask = effect.logical_mask & static_cast<uint8_t>(1 << c);
        if (part.empty()) {
            continue;
        }
        if (part.detectors.empty()) {
            throw std::logic_error("fault flips a logical without firing any detector");
        }
        if (part.detectors.size() > 2) {
            throw std::logic_error("fault needs a hyperedge");
        }
        parts.push_back(std::move(part));
    }
    return parts;
}

namespace {

struct PendingEdge {
    uint32_t u;
    int64_t v;  // -1 for boundary
    uint8_t mask;
    double p_max = 0.0;
    uint32_t mechanisms = 0;
};

uint64_t edge_key(const FaultEffect& part) {
    if (part.detectors.size() == 2) {
        return (static_cast<uint64_t>(part.detectors[0]) << 32) | part.detectors[1];
    }
    return (static_cast<uint64_t>(part.detectors[0]) << 32) | (0xFFFFFF00u | part.logical_mask);
}

}  // namespace

DecodingGraph build_graph(const Lattice& lattice, const CircuitLayout& layout, const FaultEffectTable& table,
                          const NoiseConfig& cfg) {
    cfg.validate();
    if (cfg.p <= 0.0) {
        throw std::invalid_argument("decoding graph needs p > 0");
    }
    DecodingGraph g;
    g.rounds = layout.rounds;
    g.num_ancilla = layout.num_ancilla;
    g.num_detectors = layout.num_detectors();

    std::vector<PendingEdge> pending;
    std::unordered_map<uint64_t, uint32_t> index;
    auto add = [&](const FaultEffect& part, double prob) -> uint32_t {
        uint64_t key = edge_key(part);
        auto it = index.find(key);
        if (it == index.end()) {
            PendingEdge pe;
            pe.u = part.detectors[0];
            pe.v = part.detectors.size() == 2 ? static_cast<int64_t>(part.detectors[1]) : -1;
            pe.mask = part.logical_mask;
            pe.p_max = prob;
            pe.mechanisms = 1;
            index.emplace(key, static_cast<uint32_t>(pending.size()));
            pending.push_back(pe);
            return static_cast<uint32_t>(pending.size() - 1);
        }
        PendingEdge& pe = pending[it->second];
        if (pe.mask != part.logical_mask) {
            std::ostringstream msg;
            msg << "edge " << pe.u << "-" << pe.v << " has mechanisms with logical masks " << int(pe.mask) << " and "
                << int(part.logical_mask);
            g.diagnostics.push_back(msg.str());
            if (prob > pe.p_max) {
                pe.mask = part.logical_mask;
            }
        }
        pe.p_max = std::max(pe.p_max, prob);
        pe.mechanisms++;
        return it->second;
    };

    const bool heralded = cfg.mode == NoiseMode::Erasure && cfg.p_erasure() > 0.0;
    const std::array<std::array<double, 16>, 2> channel = {pauli_channel(cfg, GateKind::CZ),
                                                           pauli_channel(cfg, GateKind::CNOT)};
    g.location_edges.resize(layout.gates.size());
    for (uint32_t loc = 0; loc < layout.gates.size(); loc++) {
        const auto& probs = channel[layout.gates[loc].kind == GateKind::CZ ? 0 : 1];
        auto& touched = g.location_edges[loc];
        for (uint8_t i = 1; i < 16; i++) {
            if (probs[i] <= 0.0 && !heralded) {
                continue;
            }
            for (const auto& part : class_parts(lattice, table.gate_effect(loc, i))) {
                touched.push_back(add(part, probs[i]));
            }
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    }
    const double q = cfg.spam_probability();
    if (q > 0.0) {
        for (uint32_t s = 0; s < layout.spam.size(); s++) {
            for (const auto& part : class_parts(lattice, table.spam_effect(s))) {
                add(part, q);
            }
        }
    }

    uint32_t next_boundary = static_cast<uint32_t>(g.num_detectors);
    g.edges.reserve(pending.size());
    for (const auto& pe : pending) {
        GraphEdge e;
        e.u = pe.u;
        e.v = pe.v >= 0 ? static_cast<uint32_t>(pe.v) : next_boundary++;
        e.p_max = pe.p_max;
        e.weight = edge_weight(pe.p_max);
        e.logical_mask = pe.mask;
        e.mechanisms = pe.mechanisms;
        g.edges.push_back(e);
    }
    g.num_vertices = next_boundary;

    g.incident_offsets.assign(g.num_vertices + 1, 0);
    for (const auto& e : g.edges) {
        g.incident_offsets[e.u + 1]++;
        g.incident_offsets[e.v + 1]++;
    }
    for (size_t v = 0; v < g.num_vertices; v++) {
        g.incident_offsets[v + 1] += g.incident_offsets[v];
    }
    g.incident_edges.resize(g.incident_offsets.back());
    std::vector<uint32_t> fill(g.incident_offsets.begin(), g.incident_offsets.end() - 1);
    for (uint32_t i = 0; i < g.edges.size(); i++) {
        g.incident_edges[fill[g.edges[i].u]++] = i;
        g.incident_edges[fill[g.edges[i].v]++] = i;
    }
    return g;
}

DecodingGraph build_graph(const Lattice& lattice, const Schedule& schedule, const NoiseConfig& cfg, int rounds) {
    CircuitLayout layout = CircuitLayout::build(lattice, schedule, rounds > 0 ? rounds : lattice.distance);
    FaultEffectTable table(lattice, schedule, layout);
    return build_graph(lattice, layout, table, cfg);
}

int64_t find_edge(const DecodingGraph& graph, const FaultEffect& part) {
    if (part.detectors.empty() || part.detectors.size() > 2) {
        return -1;
    }
    uint32_t u = part.detectors[0];
    if (u >= graph.num_detectors) {
        return -1;
    }
    for (uint32_t k = graph.incident_offsets[u]; k < graph.incident_offsets[u + 1]; k++) {
        uint32_t e = graph.incident_edges[k];
        uint32_t w = graph.other(e, u);
        if (part.detectors.size() == 2) {
            if (w == part.detectors[1]) {
                return e;
            }
        } else if (graph.is_boundary(w) && graph.edges[e].logical_mask == part.logical_mask) {
            return e;
        }
    }
    return -1;
}

ErasureOverlay overlay_erasures(const DecodingGraph& graph, const std::vector<uint32_t>& locations) {
    ErasureOverlay overlay;
    for (uint32_t loc : locations) {
        if (loc >= graph.location_edges.size()) {
            throw std::out_of_range("unknown gate location");
        }
        const auto& es = graph.location_edges[loc];
        overlay.edges.insert(overlay.edges.end(), es.begin(), es.end());
    }
    std::sort(overlay.edges.begin(), overlay.edges.end());
    overlay.edges.erase(std::unique(overlay.edges.begin(), overlay.edges.end()), overlay.edges.end());
    return overlay;
}

ErasureOverlay overlay_erasures(const DecodingGraph& graph, const ErasureRecord& record) {
    return overlay_erasures(graph, record.locations);
}

nlohmann::json graph_to_json(const DecodingGraph& graph) {
    nlohmann::json j;
    j["format"] = "erasure-decoding-graph";
    j["version"] = 1;
    j["rounds"] = graph.rounds;
    j["num_ancilla"] = graph.num_ancilla;
    nlohmann::json vs = nlohmann::json::array();
    for (uint32_t v = 0; v < graph.num_vertices; v++) {
        if (graph.is_boundary(v)) {
            vs.push_back({{"id", v}, {"boundary", true}});
        } else {
            vs.push_back({{"id", v}, {"round", v / graph.num_ancilla}, {"ancilla", v % graph.num_ancilla}});
        }
    }
    j["vertices"] = vs;
    nlohmann::json es = nlohmann::json::array();
    for (uint32_t i = 0; i < graph.edges.size(); i++) {
        const auto& e = graph.edges[i];
        es.push_back({{"id", i},
                      {"u", e.u},
                      {"v", e.v},
                      {"weight", e.weight},
                      {"p_max", e.p_max},
                      {"logical_mask", e.logical_mask}});
    }
    j["edges"] = es;
    return j;
}

}  // namespace erasure
