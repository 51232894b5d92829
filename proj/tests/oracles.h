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

// Reference checks for the decoder shared by the unit tests and the acceptance run.

#ifndef ERASURE_TESTS_ORACLES_H
#define ERASURE_TESTS_ORACLES_H

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "erasure/circuit.h"
#include "erasure/code_model.h"
#include "erasure/decoding_graph.h"
#include "erasure/noise.h"
#include "erasure/pauli_sim.h"
#include "erasure/rng.h"
#include "erasure/uf_decoder.h"

namespace erasure::oracle {

struct Harness {
    Lattice lat;
    Schedule sched;
    CircuitLayout layout;
    FaultEffectTable table;
    DecodingGraph graph;

    Harness(int d, const NoiseConfig& cfg)
        : lat(build_lattice({d, 0})),
          sched(build_schedule(lat)),
          layout(CircuitLayout::build(lat, sched, d)),
          table(lat, sched, layout),
          graph(build_graph(lat, layout, table, cfg)) {}
};

inline std::vector<uint32_t> defects_of(const FaultEffectTable& table, const TrialFaults& f, size_t n, uint8_t* mask) {
    std::vector<uint8_t> flags(n, 0);
    std::vector<uint32_t> touched;
    *mask = table.accumulate(f, flags, touched);
    std::vector<uint32_t> out;
    for (uint32_t v : touched) {
        if (flags[v]) {
            out.push_back(v);
            flags[v] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Detector boundary of an edge set, ignoring boundary vertices.
inline std::vector<uint32_t> boundary_of(const DecodingGraph& g, const std::vector<uint32_t>& edges) {
    std::vector<uint8_t> odd(g.num_vertices, 0);
    for (uint32_t e : edges) {
        odd[g.edges[e].u] ^= 1;
        odd[g.edges[e].v] ^= 1;
    }
    std::vector<uint32_t> out;
    for (uint32_t v = 0; v < g.num_detectors; v++) {
        if (odd[v]) {
            out.push_back(v);
        }
    }
    return out;
}

// Rank over GF(2) of 64-bit rows.
inline int gf2_rank(std::vector<uint64_t> rows) {
    int rank = 0;
    for (int bit = 63; bit >= 0; bit--) {
        auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](uint64_t r) { return (r >> bit) & 1; });
        if (pivot == rows.end()) {
            continue;
        }
        std::swap(*pivot, rows[rank]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (static_cast<int>(i) != rank && ((rows[i] >> bit) & 1)) {
                rows[i] ^= rows[rank];
            }
        }
        rank++;
    }
    return rank;
}


struct ErasureOracle {
    const Harness& s;
    UnionFindDecoder dec;
    std::vector<uint32_t> bits;  // detector -> bit
    size_t decoded = 0;

    explicit ErasureOracle(const Harness& setup) : s(setup), dec(setup.graph) {}

    uint64_t component_row(uint32_t loc, int c) const {
        const auto& e = s.table.component(loc, c);
        uint64_t row = 0;
        for (uint32_t d : e.detectors) {
            row |= uint64_t{1} << d;
        }
        return row | (static_cast<uint64_t>(e.logical_mask) << 62);
    }

    // Number of logical degrees of freedom left undetermined by the erased components.
    int hidden_logicals(const std::vector<uint32_t>& locs) const {
        std::vector<uint64_t> full, syn;
        for (uint32_t loc : locs) {
            for (int c = 0; c < 4; c++) {
                uint64_t r = component_row(loc, c);
                full.push_back(r);
                syn.push_back(r & ~(uint64_t{3} << 62));
            }
        }
        return gf2_rank(full) - gf2_rank(syn);
    }

    // Exact failure count of the decoder over every replacement pattern, and the
    // failure count of a maximum-likelihood decoder.
    std::pair<uint64_t, uint64_t> failures(const std::vector<uint32_t>& locs) {
        const int k = hidden_logicals(locs);
        const uint64_t patterns = uint64_t{1} << (4 * locs.size());
        auto ov = overlay_erasures(s.graph, locs);
        uint64_t uf_fail = 0;
        for (uint64_t pat = 0; pat < patterns; pat++) {
            TrialFaults f;
            for (size_t i = 0; i < locs.size(); i++) {
                auto idx = static_cast<uint8_t>((pat >> (4 * i)) & 15);
                if (idx) {
                    f.gate_faults.push_back({locs[i], TwoQubitPauli::from_index(idx)});
                }
            }
            uint8_t mask;
            auto defects = defects_of(s.table, f, s.graph.num_detectors, &mask);
            uf_fail += dec.decode(defects, ov).logical_parity != mask;
            decoded++;
        }
        uint64_t ml_fail = patterns - (patterns >> k);
        return {uf_fail, ml_fail};
    }
};

// Exhaustive check of one erased set: {decoder failures, maximum-likelihood failures}
// over all replacement patterns. Sets of size 1 and 2 are enumerated completely;
// triples are enumerated when they can hide a logical and otherwise sampled.
struct ErasureOracleReport {
    uint64_t sets = 0;
    uint64_t patterns = 0;
    uint64_t mismatched_sets = 0;
    uint64_t hiding_sets = 0;
};

inline ErasureOracleReport run_erasure_oracle(const Harness& s, uint64_t seed = 77) {
    ErasureOracle oracle(s);
    ErasureOracleReport rep;
    const auto n = static_cast<uint32_t>(s.layout.gates.size());
    auto check = [&](const std::vector<uint32_t>& locs) {
        auto [uf, ml] = oracle.failures(locs);
        rep.sets++;
        rep.patterns += uint64_t{1} << (4 * locs.size());
        rep.mismatched_sets += uf != ml;
    };
    for (uint32_t a = 0; a < n; a++) {
        check({a});
        for (uint32_t b = a + 1; b < n; b++) {
            check({a, b});
        }
    }
    Rng rng(seed);
    for (uint32_t a = 0; a < n; a++) {
        for (uint32_t b = a + 1; b < n; b++) {
            for (uint32_t c = b + 1; c < n; c++) {
                int k = oracle.hidden_logicals({a, b, c});
                if (k > 0 || rng.below(400) == 0) {
                    check({a, b, c});
                    rep.hiding_sets += k > 0;
                }
            }
        }
    }
    return rep;
}

// Trials where the peeled correction disagrees with the parity shortcut or does not
// reproduce the syndrome.
inline uint64_t peel_mismatches(const Harness& s, const NoiseConfig& cfg, uint64_t trials, uint64_t seed) {
    UnionFindDecoder dec(s.graph);
    TrialFaults f;
    uint64_t bad = 0;
    for (uint64_t t = 0; t < trials; t++) {
        Rng rng(seed, t);
        sample_trial_faults(cfg, s.layout, rng, f);
        uint8_t mask;
        auto defects = defects_of(s.table, f, s.graph.num_detectors, &mask);
        auto ov = overlay_erasures(s.graph, f.erasures);
        DecodeResult r = dec.decode(defects, ov);
        auto corr = dec.peel_correction(defects);
        bad += boundary_of(s.graph, corr) != defects || correction_parity(s.graph, corr) != r.logical_parity;
    }
    return bad;
}

}  // namespace erasure::oracle

#endif
