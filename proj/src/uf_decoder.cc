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

#include "erasure/uf_decoder.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace erasure {

UnionFindDecoder::UnionFindDecoder(const DecodingGraph& graph)
    : g_(graph),
      parent_(graph.num_vertices),
      rank_(graph.num_vertices, 0),
      potential_(graph.num_vertices, 0),
      odd_(graph.num_vertices, 0),
      boundary_(graph.num_vertices, -1),
      frontier_(graph.num_vertices),
      touched_flag_(graph.num_vertices, 0),
      growth_(graph.edges.size(), 0),
      solid_(graph.edges.size(), 0),
      stamp_(std::max(graph.num_vertices, graph.edges.size()), 0),
      cluster_count_(graph.num_vertices, 0),
      cluster_parity_(graph.num_vertices, 0),
      listed_(graph.num_vertices, 0) {
    for (uint32_t v = 0; v < graph.num_vertices; v++) {
        parent_[v] = v;
    }
}

void UnionFindDecoder::reset() {
    for (uint32_t v : touched_) {
        parent_[v] = v;
        rank_[v] = 0;
        potential_[v] = 0;
        odd_[v] = 0;
        boundary_[v] = -1;
        frontier_[v].clear();
        touched_flag_[v] = 0;
    }
    touched_.clear();
    for (uint32_t e : touched_edges_) {
        growth_[e] = 0;
        solid_[e] = 0;
    }
    touched_edges_.clear();
    finished_ = false;
}

void UnionFindDecoder::touch(uint32_t v) {
    if (touched_flag_[v]) {
        return;
    }
    touched_flag_[v] = 1;
    touched_.push_back(v);
    frontier_[v].push_back(v);
    if (g_.is_boundary(v)) {
        boundary_[v] = v;
    }
}

uint32_t UnionFindDecoder::find(uint32_t v) {
    path_.clear();
    uint32_t r = v;
    while (parent_[r] != r) {
        path_.push_back(r);
        r = parent_[r];
    }
    // Walk back from the node nearest the root so each potential becomes relative to the root.
    uint8_t acc = 0;
    for (size_t i = path_.size(); i-- > 0;) {
        uint32_t x = path_[i];
        acc ^= potential_[x];
        potential_[x] = acc;
        parent_[x] = r;
    }
    return r;
}

void UnionFindDecoder::unite(uint32_t e) {
    const GraphEdge& edge = g_.edges[e];
    touch(edge.u);
    touch(edge.v);
    uint32_t ru = find(edge.u);
    uint8_t pu = potential_[edge.u];
    uint32_t rv = find(edge.v);
    uint8_t pv = potential_[edge.v];
    if (ru == rv) {
        return;
    }
    if (rank_[ru] < rank_[rv]) {
        std::swap(ru, rv);
    }
    parent_[rv] = ru;
    potential_[rv] = pu ^ pv ^ edge.logical_mask;
    if (rank_[ru] == rank_[rv]) {
        rank_[ru]++;
    }
    odd_[ru] ^= odd_[rv];
    if (boundary_[ru] < 0) {
        boundary_[ru] = boundary_[rv];
    }
    auto& big = frontier_[ru];
    auto& small = frontier_[rv];
    if (big.size() < small.size()) {
        big.swap(small);
    }
    big.insert(big.end(), small.begin(), small.end());
    small.clear();
}

DecodeResult UnionFindDecoder::decode(const std::vector<uint32_t>& defects, const ErasureOverlay& overlay) {
    reset();
    DecodeResult result;
    for (uint32_t d : defects) {
        if (d >= g_.num_detectors) {
            throw std::out_of_range("defect is not a detector vertex");
        }
        touch(d);
        odd_[find(d)] ^= 1;
    }
    for (uint32_t e : overlay.edges) {
        if (!solid_[e]) {
            solid_[e] = 1;
            growth_[e] = g_.edges[e].weight;
            touched_edges_.push_back(e);
            unite(e);
        }
    }

    std::vector<uint32_t> roots;
    std::vector<uint32_t> fresh;
    while (true) {
        roots.clear();
        epoch_++;
        for (uint32_t d : defects) {
            uint32_t r = find(d);
            if (stamp_[r] != epoch_ && active(r)) {
                stamp_[r] = epoch_;
                roots.push_back(r);
            }
        }
        if (roots.empty()) {
            break;
        }
        std::sort(roots.begin(), roots.end());

        // First pass: prune the frontier and find the largest uniform step that
        // completes at least one edge.
        int64_t step = std::numeric_limits<int64_t>::max();
        for (uint32_t r : roots) {
            auto& fr = frontier_[r];
            for (size_t i = 0; i < fr.size();) {
                uint32_t u = fr[i];
                bool open = false;
                for (uint32_t k = g_.incident_offsets[u]; k < g_.incident_offsets[u + 1]; k++) {
                    uint32_t e = g_.incident_edges[k];
                    if (solid_[e]) {
                        continue;
                    }
                    open = true;
                    uint32_t rv = find(g_.other(e, u));
                    int64_t rate = (rv == r || active(rv)) ? 2 : 1;
                    int64_t left = g_.edges[e].weight - growth_[e];
                    step = std::min(step, (left + rate - 1) / rate);
                }
                if (open) {
                    i++;
                } else {
                    fr[i] = fr.back();
                    fr.pop_back();
                }
            }
        }
        if (step == std::numeric_limits<int64_t>::max()) {
            // Odd cluster with nowhere to grow; cannot happen on a connected graph.
            throw std::logic_error("odd cluster cannot grow");
        }
        step = std::max<int64_t>(step, 1);

        fresh.clear();
        epoch_++;
        for (uint32_t r : roots) {
            for (uint32_t u : frontier_[r]) {
                for (uint32_t k = g_.incident_offsets[u]; k < g_.incident_offsets[u + 1]; k++) {
                    uint32_t e = g_.incident_edges[k];
                    if (solid_[e]) {
                        continue;
                    }
                    if (growth_[e] == 0) {
                        touched_edges_.push_back(e);
                    }
                    growth_[e] += static_cast<int32_t>(step);
                    if (growth_[e] >= g_.edges[e].weight && stamp_[e] != epoch_) {
                        stamp_[e] = epoch_;
                        fresh.push_back(e);
                    }
                }
            }
        }
        result.growth_rounds += static_cast<uint32_t>(step);
        std::sort(fresh.begin(), fresh.end());
        for (uint32_t e : fresh) {
            solid_[e] = 1;
            unite(e);
        }
        if (trace_) {
            nlohmann::json j;
            j["growth"] = result.growth_rounds;
            j["step"] = step;
            j["active_clusters"] = roots.size();
            j["new_solid_edges"] = fresh;
            *trace_ << j.dump() << '\n';
        }
    }

    // Parity shortcut: every defect is matched either to another defect of its
    // cluster or to the cluster's designated boundary vertex.
    std::vector<uint32_t> cluster_roots;
    for (uint32_t d : defects) {
        uint32_t r = find(d);
        if (!listed_[r]) {
            listed_[r] = 1;
            cluster_roots.push_back(r);
        }
        cluster_count_[r] ^= 1;
        cluster_parity_[r] ^= potential_[d];
    }
    for (uint32_t r : cluster_roots) {
        uint8_t parity = cluster_parity_[r];
        if (cluster_count_[r]) {
            if (boundary_[r] < 0) {
                throw std::logic_error("odd cluster left without boundary");
            }
            auto b = static_cast<uint32_t>(boundary_[r]);
            find(b);
            parity ^= potential_[b];
        }
        result.logical_parity ^= parity;
        cluster_count_[r] = 0;
        cluster_parity_[r] = 0;
        listed_[r] = 0;
    }
    result.num_clusters = static_cast<uint32_t>(cluster_roots.size());
    if (keep_solid_) {
        for (uint32_t e : touched_edges_) {
            if (solid_[e]) {
                result.solid_edges.push_back(e);
            }
        }
        std::sort(result.solid_edges.begin(), result.solid_edges.end());
    }
    finished_ = true;
    return result;
}

std::vector<uint32_t> UnionFindDecoder::peel_correction(const std::vector<uint32_t>& defects) {
    if (!finished_) {
        throw std::logic_error("peel_correction needs a finished decode");
    }
    std::vector<uint8_t> mark(g_.num_vertices, 0);
    for (uint32_t d : defects) {
        if (d >= g_.num_detectors || !touched_flag_[d]) {
            throw std::logic_error("defect not part of the decoded forest");
        }
        mark[d] ^= 1;
    }
    // Root every cluster at its designated boundary vertex when it has one,
    // otherwise at its smallest vertex.
    std::vector<uint32_t> members = touched_;
    std::sort(members.begin(), members.end());
    std::vector<int64_t> start(g_.num_vertices, -1);
    for (uint32_t v : members) {
        uint32_t r = find(v);
        if (start[r] < 0) {
            start[r] = boundary_[r] >= 0 ? boundary_[r] : v;
        }
    }
    std::vector<uint8_t> seen(g_.num_vertices, 0);
    std::vector<int64_t> parent_edge(g_.num_vertices, -1);
    std::vector<uint32_t> order;
    std::vector<uint32_t> correction;
    for (uint32_t v : members) {
        uint32_t r = find(v);
        if (start[r] < 0) {
            continue;
        }
        auto root = static_cast<uint32_t>(start[r]);
        start[r] = -1;
        order.clear();
        order.push_back(root);
        seen[root] = 1;
        for (size_t head = 0; head < order.size(); head++) {
            uint32_t u = order[head];
            for (uint32_t k = g_.incident_offsets[u]; k < g_.incident_offsets[u + 1]; k++) {
                uint32_t e = g_.incident_edges[k];
                if (!solid_[e]) {
                    continue;
                }
                uint32_t w = g_.other(e, u);
                if (!seen[w]) {
                    seen[w] = 1;
                    parent_edge[w] = e;
                    order.push_back(w);
                }
            }
        }
        for (size_t i = order.size(); i-- > 1;) {
            uint32_t u = order[i];
            if (mark[u]) {
                auto e = static_cast<uint32_t>(parent_edge[u]);
                correction.push_back(e);
                mark[u] = 0;
                mark[g_.other(e, u)] ^= 1;
            }
        }
        if (mark[root] && !g_.is_boundary(root)) {
            throw std::logic_error("cluster has odd parity and no boundary");
        }
        mark[root] = 0;
    }
    std::sort(correction.begin(), correction.end());
    return correction;
}

uint8_t correction_parity(const DecodingGraph& graph, const std::vector<uint32_t>& edges) {
    uint8_t m = 0;
    for (uint32_t e : edges) {
        m ^= graph.edges[e].logical_mask;
    }
    return m;
}

}  // namespace erasure
