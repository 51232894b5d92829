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

#include "erasure/noise.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erasure {

void NoiseConfig::validate() const {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("p must lie in [0, 1)");
    }
    if (!(erasure_fraction >= 0.0 && erasure_fraction <= 1.0)) {
        throw std::invalid_argument("erasure fraction must lie in [0, 1]");
    }
    if (!(p_m >= 0.0 && p_m <= 1.0)) {
        throw std::invalid_argument("p_m must lie in [0, 1]");
    }
    if (mode == NoiseMode::Biased) {
        if (erasure_fraction != 0.0) {
            throw std::invalid_argument("biased noise does not support erasures");
        }
        if (!(eta > 0.0)) {
            throw std::invalid_argument("bias eta must be positive");
        }
        // Total probability of the biased channel must stay below one.
        double total = 0.0;
        for (GateKind k : {GateKind::CZ, GateKind::CNOT}) {
            auto probs = pauli_channel(*this, k);
            double s = 0.0;
            for (int i = 1; i < 16; i++) {
                s += probs[i];
            }
            total = std::max(total, s);
        }
        if (total > 1.0) {
            throw std::invalid_argument("biased channel probabilities exceed one");
        }
    }
}

std::string TwoQubitPauli::str() const { return std::string{pauli_char(first), pauli_char(second)}; }

GateErrorEvent sample_gate_error(const NoiseConfig& cfg, Rng& rng) {
    GateErrorEvent ev;
    double u = rng.uniform();
    if (u >= cfg.p) {
        return ev;
    }
    if (u < cfg.p_erasure()) {
        ev.kind = FaultKind::Erasure;
        return ev;
    }
    ev.kind = FaultKind::Pauli;
    ev.pauli = TwoQubitPauli::from_index(static_cast<uint8_t>(1 + rng.below(15)));
    return ev;
}

TwoQubitPauli apply_erasure_replacement(const GateErrorEvent& event, const GateLocation& where, Rng& rng,
                                        ErasureRecord& record) {
    if (event.kind != FaultKind::Erasure) {
        throw std::invalid_argument("event is not an erasure");
    }
    auto bits = static_cast<uint8_t>(rng() >> 60);
    TwoQubitPauli repl = TwoQubitPauli::from_index(bits);
    record.locations.push_back(event.location);
    record.replacements.push_back(repl);
    record.random_outcomes.emplace_back(where.round, where.ancilla);
    return repl;
}

bool sample_spam_error(const NoiseConfig& cfg, Rng& rng) {
    double q = cfg.spam_probability();
    if (q <= 0.0) {
        return false;
    }
    if (q >= 1.0) {
        return true;
    }
    return rng.uniform() < q;
}

std::array<double, 16> pauli_channel(const NoiseConfig& cfg, GateKind kind) {
    std::array<double, 16> probs{};
    if (cfg.mode == NoiseMode::Erasure) {
        for (int i = 1; i < 16; i++) {
            probs[i] = cfg.p_pauli() / 15.0;
        }
        return probs;
    }
    double other = std::isinf(cfg.eta) ? 0.0 : cfg.p / cfg.eta;
    for (int i = 1; i < 16; i++) {
        probs[i] = other;
    }
    const uint8_t zi = TwoQubitPauli{Pauli::Z, Pauli::I}.index();
    const uint8_t iz = TwoQubitPauli{Pauli::I, Pauli::Z}.index();
    const uint8_t zz = TwoQubitPauli{Pauli::Z, Pauli::Z}.index();
    if (kind == GateKind::CNOT) {
        probs[zi] = cfg.p;
        probs[iz] = cfg.p / 2;
        probs[zz] = cfg.p / 2;
    } else {
        probs[zi] = cfg.p;
        probs[iz] = cfg.p;
    }
    return probs;
}

namespace {

uint8_t draw_conditional(const std::array<double, 16>& probs, double total, Rng& rng) {
    double u = rng.uniform() * total;
    double acc = 0.0;
    uint8_t last = 0;
    for (uint8_t i = 1; i < 16; i++) {
        if (probs[i] <= 0.0) {
            continue;
        }
        acc += probs[i];
        last = i;
        if (u < acc) {
            return i;
        }
    }
    return last;
}

double channel_total(const std::array<double, 16>& probs) {
    double s = 0.0;
    for (int i = 1; i < 16; i++) {
        s += probs[i];
    }
    return s;
}

}  // namespace

GateErrorEvent sample_biased_gate_error(const NoiseConfig& cfg, GateKind kind, Rng& rng) {
    if (cfg.mode != NoiseMode::Biased) {
        throw std::invalid_argument("noise config is not in biased mode");
    }
    if (cfg.erasure_fraction != 0.0) {
        throw std::invalid_argument("biased noise does not support erasures");
    }
    auto probs = pauli_channel(cfg, kind);
    double u = rng.uniform();
    GateErrorEvent ev;
    double acc = 0.0;
    for (uint8_t i = 1; i < 16; i++) {
        acc += probs[i];
        if (u < acc) {
            ev.kind = FaultKind::Pauli;
            ev.pauli = TwoQubitPauli::from_index(i);
            return ev;
        }
    }
    return ev;
}

void sample_trial_faults(const NoiseConfig& cfg, const CircuitLayout& layout, Rng& rng, TrialFaults& out) {
    out.clear();
    if (cfg.mode == NoiseMode::Erasure) {
        const uint64_t n = layout.gates.size();
        const double pe_frac = cfg.p > 0 ? cfg.p_erasure() / cfg.p : 0.0;
        uint64_t i = rng.geometric(cfg.p);
        while (i < n) {
            auto loc = static_cast<uint32_t>(i);
            GateErrorEvent ev;
            ev.location = loc;
            if (rng.uniform() < pe_frac) {
                ev.kind = FaultKind::Erasure;
                TwoQubitPauli repl = apply_erasure_replacement(ev, layout.gates[loc], rng, out.erasures);
                if (!repl.is_identity()) {
                    out.gate_faults.push_back({loc, repl});
                }
            } else {
                out.gate_faults.push_back({loc, TwoQubitPauli::from_index(static_cast<uint8_t>(1 + rng.below(15)))});
            }
            uint64_t skip = rng.geometric(cfg.p);
            if (skip >= n) {
                break;
            }
            i += skip + 1;
        }
    } else {
        for (GateKind kind : {GateKind::CZ, GateKind::CNOT}) {
            const auto& ids = layout.gates_by_kind[kind == GateKind::CZ ? 0 : 1];
            auto probs = pauli_channel(cfg, kind);
            double total = channel_total(probs);
            const uint64_t n = ids.size();
            uint64_t i = rng.geometric(total);
            while (i < n) {
                out.gate_faults.push_back({ids[i], TwoQubitPauli::from_index(draw_conditional(probs, total, rng))});
                uint64_t skip = rng.geometric(total);
                if (skip >= n) {
                    break;
                }
                i += skip + 1;
            }
        }
    }
    const double q = cfg.spam_probability();
    const uint64_t ns = layout.spam.size();
    uint64_t j = rng.geometric(q);
    while (j < ns) {
        out.spam_flips.push_back(static_cast<uint32_t>(j));
        uint64_t skip = rng.geometric(q);
        if (skip >= ns) {
            break;
        }
        j += skip + 1;
    }
}

}  // namespace erasure
