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

#include "erasure/experiments.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "erasure/rng.h"

namespace erasure {
namespace {

RunPolicy fixed_trials(uint64_t n, unsigned threads = 1) {
    RunPolicy p;
    p.min_failures = n + 1;
    p.max_trials = n;
    p.chunk = 1000;
    p.threads = threads;
    return p;
}

NoiseConfig erasure_config(double p, double re, uint64_t seed = 3) {
    NoiseConfig c;
    c.p = p;
    c.erasure_fraction = re;
    c.seed = seed;
    return c;
}

int gf2_rank(std::vector<uint64_t> rows) {
    int rank = 0;
    for (int bit = 63; bit >= 0; --bit) {
        auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](uint64_t r) { return (r >> bit) & 1; });
        if (pivot == rows.end()) continue;
        std::swap(*pivot, rows[rank]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<int>(i) != rank && ((rows[i] >> bit) & 1)) rows[i] ^= rows[rank];
        }
        ++rank;
    }
    return rank;
}

TEST(Wilson, reference_values) {
    auto [lo, hi] = wilson_interval(10, 100);
    EXPECT_NEAR(lo, 0.05523, 5e-5);
    EXPECT_NEAR(hi, 0.17437, 5e-5);
    auto [lo0, hi0] = wilson_interval(0, 1000);
    EXPECT_EQ(lo0, 0.0);
    EXPECT_GT(hi0, 0.0);
    EXPECT_LT(hi0, 0.004);
}

TEST(LogicalRate, noiseless_circuit_never_fails) {
    const LogicalRateEstimate e = estimate_logical_rate(erasure_config(0.0, 0.5), 3, fixed_trials(500));
    EXPECT_EQ(e.trials, 500u);
    EXPECT_EQ(e.failures, 0u);
    EXPECT_EQ(e.p_L, 0.0);
}

TEST(LogicalRate, thread_count_does_not_change_counts) {
    RunPolicy one;
    one.min_failures = 50;
    one.chunk = 500;
    RunPolicy three = one;
    three.threads = 3;
    const NoiseConfig cfg = erasure_config(0.02, 0.5);
    const LogicalRateEstimate a = estimate_logical_rate(cfg, 3, one);
    const LogicalRateEstimate b = estimate_logical_rate(cfg, 3, three);
    EXPECT_EQ(a.trials, b.trials);
    EXPECT_EQ(a.failures, b.failures);
    EXPECT_GE(a.failures, 50u);
    EXPECT_EQ(a.trials % one.chunk, 0u);
}

TEST(LogicalRate, seed_changes_sample) {
    const LogicalRateEstimate a = estimate_logical_rate(erasure_config(0.03, 0.5, 1), 3, fixed_trials(4000));
    const LogicalRateEstimate b = estimate_logical_rate(erasure_config(0.03, 0.5, 2), 3, fixed_trials(4000));
    const LogicalRateEstimate c = estimate_logical_rate(erasure_config(0.03, 0.5, 1), 3, fixed_trials(4000));
    EXPECT_NE(a.failures, b.failures);
    EXPECT_EQ(a.failures, c.failures);
}

TEST(LogicalRate, increases_with_p) {
    const RunPolicy pol = fixed_trials(20000);
    const LogicalRateEstimate lo = estimate_logical_rate(erasure_config(0.01, 1.0), 3, pol);
    const LogicalRateEstimate hi = estimate_logical_rate(erasure_config(0.04, 1.0), 3, pol);
    EXPECT_LT(lo.ci_high, hi.ci_low);
}

TEST(LogicalRate, pure_erasure_matches_exact_conditional_rate) {
    // For pure erasure the decoder is optimal, so its failure rate given an erased set E
    // is 1 - 2^-k(E), where k counts logicals not pinned down by the syndrome of E.
    const double p = 0.05;
    const int d = 3;
    const uint64_t n = 40000;
    const LogicalRateEstimate uf = estimate_logical_rate(erasure_config(p, 1.0, 11), d, fixed_trials(n));

    const Lattice lat = build_lattice({d, 0});
    const Schedule sched = build_schedule(lat);
    const CircuitLayout layout = CircuitLayout::build(lat, sched, d);
    const FaultEffectTable table(lat, sched, layout);
    ASSERT_LE(layout.num_detectors(), 62u);
    auto row = [&](uint32_t loc, int c) {
        const FaultEffect& e = table.component(loc, c);
        uint64_t r = static_cast<uint64_t>(e.logical_mask) << 62;
        for (uint32_t v : e.detectors) r |= uint64_t{1} << v;
        return r;
    };
    Rng rng(2024);
    double sum = 0.0;
    for (uint64_t t = 0; t < n; ++t) {
        std::vector<uint64_t> full, syn;
        for (uint32_t loc = 0; loc < layout.gates.size(); ++loc) {
            if (!rng.bernoulli(p)) continue;
            for (int c = 0; c < 4; ++c) {
                full.push_back(row(loc, c));
                syn.push_back(full.back() & ~(uint64_t{3} << 62));
            }
        }
        const int k = gf2_rank(full) - gf2_rank(syn);
        sum += 1.0 - std::ldexp(1.0, -k);
    }
    const double exact = sum / n;
    const double sigma = std::sqrt(exact * (1 - exact) / n);
    EXPECT_NEAR(uf.p_L, exact, 4.5 * sigma) << "oracle " << exact;
}

std::vector<LogicalRateEstimate> synthetic_crossing(double p_th, double nu) {
    std::vector<LogicalRateEstimate> pts;
    for (int d : {5, 7}) {
        for (double p : linspace(0.006, 0.014, 9)) {
            const double x = (p - p_th) * std::pow(d, 1.0 / nu);
            LogicalRateEstimate e;
            e.d = d;
            e.p = p;
            e.trials = 1000000000;
            e.failures = static_cast<uint64_t>(std::llround((0.1 + 5 * x + 50 * x * x) * e.trials));
            e.p_L = static_cast<double>(e.failures) / e.trials;
            pts.push_back(e);
        }
    }
    return pts;
}

TEST(Threshold, recovers_synthetic_crossing) {
    ThresholdOptions opts;
    opts.bootstrap_samples = 20;
    const ThresholdEstimate t = fit_threshold(synthetic_crossing(0.0103, 1.5), opts);
    EXPECT_NEAR(t.p_th, 0.0103, 2e-5);
    EXPECT_NEAR(t.nu, 1.5, 0.05);
    EXPECT_LT(t.uncertainty, 1e-4);
    opts.report_scale = 2.0;
    EXPECT_NEAR(fit_threshold(synthetic_crossing(0.0103, 1.5), opts).p_th, 0.0206, 4e-5);
}

TEST(Threshold, missing_crossing_is_reported) {
    std::vector<LogicalRateEstimate> pts = synthetic_crossing(0.0103, 1.5);
    for (auto& e : pts) {
        if (e.d == 7) {
            e.failures /= 2;
            e.p_L /= 2;
        }
    }
    EXPECT_THROW(fit_threshold(pts), NoCrossing);
}

TEST(Threshold, bracket_ignores_points_with_few_failures) {
    // With this seed both distances see exactly one failure at p ~ 1.2%, far below
    // the pure-erasure crossing near 5%.
    NoiseConfig base;
    base.erasure_fraction = 1.0;
    base.seed = 101;
    RunPolicy coarse;
    coarse.min_failures = 200;
    coarse.max_trials = 20000;
    const auto [lo, hi] = bracket_crossing(base, 5, 7, 0.002, 0.1, 12, coarse);
    EXPECT_GT(lo, 0.03);
    EXPECT_LT(hi, 0.075);
}

TEST(Threshold, automatic_grid_contains_the_crossing) {
    NoiseConfig base;
    base.erasure_fraction = 1.0;
    base.seed = 101;
    ThresholdSearch search;
    search.points = 5;
    search.coarse.min_failures = 100;
    search.coarse.max_trials = 4000;
    RunPolicy fine;
    fine.min_failures = 400;
    fine.max_trials = 20000;
    ThresholdOptions opts;
    opts.bootstrap_samples = 0;
    const ThresholdEstimate t = fit_threshold(threshold_scan(base, {3, 5}, search, fine), opts);
    EXPECT_GT(t.p_th, 0.03);
    EXPECT_LT(t.p_th, 0.08);
}

TEST(Exponent, recovers_power_law) {
    std::vector<LogicalRateEstimate> pts;
    for (int i = 0; i < 8; ++i) {
        LogicalRateEstimate e;
        e.d = 5;
        e.p = 0.01 * std::pow(10.0, -1.0 + i / 7.0 * 0.7);
        e.trials = 1000000000;
        e.failures = static_cast<uint64_t>(std::llround(0.3 * std::pow(e.p / 0.01, 3.0) * e.trials));
        e.p_L = static_cast<double>(e.failures) / e.trials;
        pts.push_back(e);
    }
    const ExponentFit f = fit_exponent_points(pts, 0.01, {0.1, 0.51});
    EXPECT_NEAR(f.nu, 3.0, 0.01);
    EXPECT_EQ(f.points.size(), 8u);
    EXPECT_THROW(fit_exponent_points(pts, 0.01, {0.1, 0.15}), std::invalid_argument);
}

TEST(Output, csv_and_json_schemas) {
    LogicalRateEstimate e = estimate_logical_rate(erasure_config(0.02, 0.5), 3, fixed_trials(1000));
    std::ostringstream csv;
    write_rates_csv(csv, {e});
    std::istringstream in(csv.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "d,p,R_e,p_m,eta,trials,failures,p_L,ci_low,ci_high");
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 9);
    const nlohmann::json j = rates_to_json({e});
    EXPECT_EQ(j["schema"], "logical-rates");
    EXPECT_EQ(j["version"], kResultsSchemaVersion);
    EXPECT_EQ(j["rows"][0]["trials"], 1000u);
}

TEST(Linspace, endpoints) {
    const std::vector<double> v = linspace(1.0, 2.0, 5);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v.front(), 1.0);
    EXPECT_EQ(v.back(), 2.0);
    EXPECT_DOUBLE_EQ(v[2], 1.5);
}

}  // namespace
}  // namespace erasure
