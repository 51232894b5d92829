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

#ifndef ERASURE_UF_DECODER_H
#define ERASURE_UF_DECODER_H

#include <cstdint>
#include <ostream>
#include <vector>

#include "erasure/decoding_graph.h"

namespace erasure {

struct DecodeResult {
    /// Bit c is set when the correction flips logicals[c].
    uint8_t logical_parity = 0;
    uint32_t num_clusters = 0;
    uint32_t growth_rounds = 0;
    /// Solid edges at the end of decoding; only filled when requested.
    std::vector<uint32_t> solid_edges;
};

/// Weighted union-find decoder. Owns the per-trial cluster forest and reuses its
/// buffers between calls; the graph is only read.
class UnionFindDecoder {
   public:
    explicit UnionFindDecoder(const DecodingGraph& graph);

    DecodeResult decode(const std::vector<uint32_t>& defects, const ErasureOverlay& overlay);

    /// Explicit correction from the forest left by the last decode() call, by
    /// peeling a spanning tree of every cluster.
    std::vector<uint32_t> peel_correction(const std::vector<uint32_t>& defects);

    void set_keep_solid_edges(bool keep) { keep_solid_ = keep; }
    /// Writes one JSON line per growth round when non-null.
    void set_trace(std::ostream* out) { trace_ = out; }

   private:
    void reset();
    void touch(uint32_t v);
    uint32_t find(uint32_t v);
    void unite(uint32_t e);
    bool active(uint32_t root) const { return odd_[root] && boundary_[root] < 0; }

    const DecodingGraph& g_;
    std::vector<uint32_t> parent_;
    std::vector<uint8_t> rank_;
    std::vector<uint8_t> potential_;  // mask relative to parent
    std::vector<uint8_t> odd_;
    std::vector<int64_t> boundary_;  // designated boundary vertex of a root, or -1
    std::vector<std::vector<uint32_t>> frontier_;
    std::vector<uint8_t> touched_flag_;
    std::vector<uint32_t> touched_;
    std::vector<int32_t> growth_;
    std::vector<uint8_t> solid_;
    std::vector<uint32_t> touched_edges_;
    std::vector<uint32_t> stamp_;
    uint32_t epoch_ = 0;
    std::vector<uint8_t> cluster_count_;
    std::vector<uint8_t> cluster_parity_;
    std::vector<uint8_t> listed_;
    std::vector<uint32_t> path_;
    bool finished_ = false;
    bool keep_solid_ = false;
    std::ostream* trace_ = nullptr;
};

/// XOR of the logical masks of the given edges.
uint8_t correction_parity(const DecodingGraph& graph, const std::vector<uint32_t>& edges);

}  // namespace erasure

#endif
