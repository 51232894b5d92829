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

#include "erasure/pauli_sim.h"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace erasure;

TEST(PauliSim, cnot_conjugation) {
    PauliFrame f(2);
    f.set(0, Pauli::X);
    propagate(f, GateKind::CNOT, 0, 1);
    EXPECT_EQ(f.get(0), Pauli::X);
    EXPECT_EQ(f.get(1), Pauli::X);
    f.clear();
    f.set(1, Pauli::Z);
    propagate(f, GateKind::CNOT, 0, 1);
    EXPECT_EQ(f.get(0), Pauli::Z);
    EXPECT_EQ(f.get(1), Pauli::Z);
}

TEST(PauliSim, cz_conjugation) {
    PauliFrame f(2);
    f.set(0, Pauli::X);
    propagate(f, GateKind::CZ, 0, 1);
    EXPECT_EQ(f.get(0), Pauli::X);
    EXPECT_EQ(f.get(1), Pauli::Z);
    f.clear();
    f.set(0, Pauli::Y);
    f.set(1, Pauli::Y);
    propagate(f, GateKind::CZ, 0, 1);
    EXPECT_EQ(f.get(0), Pauli::X);
    EXPECT_EQ(f.get(1), Pauli::X);
}

TEST(PauliSim, gates_are_involutions) {
    Rng rng(3);
    for (int t = 0; t < 1000; t++) {
        PauliFrame f(4);
        for (uint32_t q = 0; q < 4; q++) {
            f.set(q, static_cast<Pauli>(rng.below(4)));
        }
        PauliFrame g = f;
        GateKind k = rng.below(2) ? GateKind::CZ : GateKind::CNOT;
        propagate(g, k, 1, 3);
        propagate(g, k, 1, 3);
        EXPECT_EQ(f, g);
    }
}

TEST(PauliSim, noiseless_trial_is_quiet) {
    Lattice lat = build_lattice({5, 0});
    Schedule s = build_schedule(lat);
    NoiseConfig cfg;
    Rng rng(1);
    SyndromeTrial t = run_trial(lat, s, cfg, rng);
    EXPECT_EQ(t.detectors.size(), 6u * 24);
    EXPECT_TRUE(t.defects().empty());
    EXPECT_EQ(t.logical_flips, 0);
}

// A Z error on the ancilla after any gate only flips that round's outcome.
TEST(PauliSim, ancilla_z_flips_one_measurement) {
    Lattice lat = build_lattice({3, 0});
    Schedule s = build_schedule(lat);
    CircuitLayout layout = CircuitLayout::build(lat, s, 3);
    for (uint32_t loc = 0; loc < layout.gates.size(); loc++) {
        TrialFaults f;
        f.gate_faults.push_back({loc, {Pauli::Z, Pauli::I}});
        SyndromeTrial t = simulate_faults(lat, s, layout, f);
        const auto& g = layout.gates[loc];
        std::vector<uint32_t> expect = {layout.detector(g.round, g.ancilla), layout.detector(g.round + 1, g.ancilla)};
        EXPECT_EQ(t.defects(), expect);
        EXPECT_EQ(t.logical_flips, 0);
    }
}

// A data error after the final gate of a round is caught by the next round's checks.
TEST(PauliSim, late_data_error_matches_stabilizers) {
    Lattice lat = build_lattice({3, 0});
    Schedule s = build_schedule(lat);
    CircuitLayout layout = CircuitLayout::build(lat, s, 3);
    for (uint32_t loc = layout.step_offsets[3]; loc < layout.step_offsets[4]; loc++) {
        const auto& g = layout.gates[loc];
        for (Pauli p : {Pauli::X, Pauli::Z}) {
            TrialFaults f;
            f.gate_faults.push_back({loc, {Pauli::I, p}});
            SyndromeTrial t = simulate_faults(lat, s, layout, f);
            std::vector<uint32_t> expect;
            for (uint32_t a = 0; a < lat.num_ancilla(); a++) {
                if (anticommutes(p, lat.stabilizer_paulis(a)[g.data])) {
                    expect.push_back(layout.detector(1, a));
                }
            }
            EXPECT_EQ(t.defects(), expect);
        }
    }
}

TEST(PauliSim, single_faults_flip_at_most_two_per_class) {
    for (GateOrder order : {GateOrder::HookAligned, GateOrder::UniformZ}) {
        Lattice lat = build_lattice({3, 0});
        Schedule s = build_schedule(lat, order);
        CircuitLayout layout = CircuitLayout::build(lat, s, 3);
        FaultEffectTable table(lat, s, layout);
        for (uint32_t loc = 0; loc < layout.gates.size(); loc++) {
            for (int c = 0; c < 4; c++) {
                const auto& e = table.component(loc, c);
                std::set<int> classes;
                for (uint32_t d : e.detectors) {
                    classes.insert(lat.stabilizers[d % lat.num_ancilla()].check_class);
                }
                ASSERT_LE(classes.size(), 1u);
                ASSERT_LE(e.detectors.size(), 2u);
                if (!classes.empty()) {
                    int cls = *classes.begin();
                    EXPECT_EQ(e.logical_mask & (1 << (1 - cls)), 0);
                }
            }
            for (uint8_t i = 1; i < 16; i++) {
                const auto& e = table.gate_effect(loc, i);
                std::array<int, 2> per_class{};
                for (uint32_t d : e.detectors) {
                    per_class[lat.stabilizers[d % lat.num_ancilla()].check_class]++;
                }
                EXPECT_LE(per_class[0], 2);
                EXPECT_LE(per_class[1], 2);
            }
        }
        for (uint32_t sp = 0; sp < layout.spam.size(); sp++) {
            EXPECT_EQ(table.spam_effect(sp).detectors.size(), 2u);
        }
    }
}

TEST(PauliSim, table_matches_frame_simulation) {
    for (int d : {3, 5}) {
        Lattice lat = build_lattice({d, 0});
        Schedule s = build_schedule(lat);
        CircuitLayout layout = CircuitLayout::build(lat, s, d);
        FaultEffectTable table(lat, s, layout);
        NoiseConfig cfg;
        cfg.p = 0.02;
        cfg.erasure_fraction = 0.5;
        cfg.p_m = 0.01;
        std::vector<uint8_t> flags(layout.num_detectors(), 0);
        std::vector<uint32_t> touched;
        for (uint64_t trial = 0; trial < 2000; trial++) {
            Rng rng(5, trial);
            TrialFaults f;
            sample_trial_faults(cfg, layout, rng, f);
            SyndromeTrial t = simulate_faults(lat, s, layout, f);
            touched.clear();
            uint8_t mask = table.accumulate(f, flags, touched);
            std::vector<uint32_t> defects;
            for (uint32_t v : touched) {
                if (flags[v]) {
                    defects.push_back(v);
                    flags[v] = 0;
                }
            }
            std::sort(defects.begin(), defects.end());
            ASSERT_EQ(defects, t.defects());
            ASSERT_EQ(mask, t.logical_flips);
        }
    }
}

TEST(PauliSim, erasure_effects_stay_local) {
    Lattice lat = build_lattice({3, 0});
    Schedule s = build_schedule(lat);
    CircuitLayout layout = CircuitLayout::build(lat, s, 3);
    for (uint32_t loc = 0; loc < layout.gates.size(); loc++) {
        const auto& g = layout.gates[loc];
        std::set<uint32_t> nearby = {g.ancilla};
        for (uint32_t a = 0; a < lat.num_ancilla(); a++) {
            if (lat.stabilizer_paulis(a)[g.data] != Pauli::I) {
                nearby.insert(a);
            }
            for (const auto& leg : lat.stabilizers[g.ancilla].legs) {
                if (lat.stabilizer_paulis(a)[leg.data] != Pauli::I) {
                    nearby.insert(a);
                }
            }
        }
        for (uint8_t i = 0; i < 16; i++) {
            TrialFaults f;
            f.gate_faults.push_back({loc, TwoQubitPauli::from_index(i)});
            for (uint32_t det : simulate_faults(lat, s, layout, f).defects()) {
                uint32_t r = det / lat.num_ancilla();
                EXPECT_TRUE(r == g.round || r == g.round + 1);
                EXPECT_TRUE(nearby.count(det % lat.num_ancilla()));
            }
        }
    }
}

TEST(PauliSim, detector_rate_bounded) {
    Lattice lat = build_lattice({3, 0});
    Schedule s = build_schedule(lat);
    CircuitLayout layout = CircuitLayout::build(lat, s, 3);
    NoiseConfig cfg;
    cfg.p = 0.01;
    uint64_t fired = 0, total = 0;
    for (uint64_t trial = 0; trial < 20000; trial++) {
        Rng rng(2, trial);
        SyndromeTrial t = run_trial(lat, s, layout, cfg, rng);
        fired += t.defects().size();
        total += t.detectors.size();
    }
    double rate = static_cast<double>(fired) / total;
    EXPECT_GT(rate, 0.0);
    EXPECT_LT(rate, 8 * cfg.p);
}

TEST(PauliSim, deterministic) {
    Lattice lat = build_lattice({5, 0});
    Schedule s = build_schedule(lat);
    NoiseConfig cfg;
    cfg.p = 0.02;
    cfg.erasure_fraction = 0.7;
    cfg.p_m = 0.01;
    for (uint64_t trial = 0; trial < 50; trial++) {
        Rng a(99, trial), b(99, trial);
        SyndromeTrial ta = run_trial(lat, s, cfg, a);
        SyndromeTrial tb = run_trial(lat, s, cfg, b);
        EXPECT_EQ(ta.raw, tb.raw);
        EXPECT_EQ(ta.logical_flips, tb.logical_flips);
        EXPECT_EQ(ta.erasures.locations, tb.erasures.locations);
    }
}

TEST(PauliSim, json_dump_is_one_line) {
    Lattice lat = build_lattice({3, 0});
    Schedule s = build_schedule(lat);
    NoiseConfig cfg;
    cfg.p = 0.05;
    cfg.erasure_fraction = 1.0;
    Rng rng(4);
    std::ostringstream os;
    write_trial_json(os, 7, run_trial(lat, s, cfg, rng));
    std::string out = os.str();
    EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 1);
    EXPECT_NE(out.find("\"trial\":7"), std::string::npos);
}
