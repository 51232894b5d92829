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

#ifndef ERASURE_EXPERIMENTS_H
#define ERASURE_EXPERIMENTS_H

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "erasure/code_model.h"
#include "erasure/decoding_graph.h"
#include "erasure/noise.h"
#include "erasure/pauli_sim.h"
#include "json.hpp"

namespace erasure {

inline constexpr int kResultsSchemaVersion = 1;

struct LogicalRateEstimate {
    int d = 0;
    double p = 0.0;
    double erasure_fraction = 0.0;
    double p_m = 0.0;
    double eta = 0.0;
    uint64_t trials = 0;
    uint64_t failures = 0;
    double p_L = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(uint64_t failures, uint64_t trials, double z = 1.959963984540054);

struct RunPolicy {
    uint64_t min_failures = 100;
    uint64_t max_trials = 1000000;
    uint64_t chunk = 2000;
    unsigned threads = 1;
};

/// Everything that is fixed for one (distance, noise) point: circuit, fault table and
/// decoding graph. Trials are independent and may run concurrently.
class MemoryExperiment {
   public:
    MemoryExperiment(int distance, const NoiseConfig& cfg, GateOrder order = GateOrder::HookAligned);

    /// Failures among trials [first, first + count).
    uint64_t run_chunk(uint64_t first, uint64_t count) const;

    const Lattice& lattice() const { return lattice_; }
    const Schedule& schedule() const { return schedule_; }
    const CircuitLayout& layout() const { return layout_; }
    const DecodingGraph& graph() const { return graph_; }
    const NoiseConfig& config() const { return cfg_; }

   private:
    NoiseConfig cfg_;
    Lattice lattice_;
    Schedule schedule_;
    CircuitLayout layout_;
    FaultEffectTable table_;
    DecodingGraph graph_;
};

/// Runs trials in fixed-size chunks until `min_failures` is reached at a chunk
/// boundary or `max_trials` is exhausted. Counts depend only on the seed, never on
/// the thread count.
LogicalRateEstimate estimate_logical_rate(const NoiseConfig& cfg, int d, const RunPolicy& policy);

class NoCrossing : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct ThresholdEstimate {
    double p_th = 0.0;
    double uncertainty = 0.0;
    double nu = 1.0;
    std::vector<int> distances;
    std::pair<double, double> window;
    std::array<double, 3> coefficients{};  // A, B, C of A + Bx + Cx^2
    double chi2 = 0.0;
    std::vector<LogicalRateEstimate> points;
};

struct ThresholdOptions {
    int bootstrap_samples = 200;
    uint64_t bootstrap_seed = 1;
    /// Multiplies p_th and its uncertainty on output (2 for biased noise).
    double report_scale = 1.0;
};

/// Finite-size-scaling crossing fit to already measured points.
ThresholdEstimate fit_threshold(const std::vector<LogicalRateEstimate>& points, const ThresholdOptions& opts = {});

/// Coarse log-spaced scan for the first grid interval where the larger distance stops
/// outperforming the smaller one. Points with fewer than 20 failures at the smaller
/// distance are not used to order the curves. Throws NoCrossing when the order never swaps.
std::pair<double, double> bracket_crossing(const NoiseConfig& base, int d_small, int d_large, double lo, double hi,
                                           int points, const RunPolicy& policy);

/// Automatic grid for a threshold scan: a coarse log bracket over [lo, hi], then
/// `points` linear values over 0.75-1.25x the bracket midpoint. If the fine grid
/// does not contain a fitted crossing it is rescanned once over 0.5-1.6x.
struct ThresholdSearch {
    double lo = 0.002;
    double hi = 0.1;
    int bracket_points = 12;
    int points = 9;
    RunPolicy coarse;
};

/// Rates on the automatic grid, for every distance. Throws NoCrossing if even the
/// widened grid has no crossing.
std::vector<LogicalRateEstimate> threshold_scan(const NoiseConfig& base, const std::vector<int>& distances,
                                                const ThresholdSearch& search, const RunPolicy& policy);

ThresholdEstimate estimate_threshold(const NoiseConfig& base, const std::vector<int>& distances,
                                     const std::vector<double>& ps, const RunPolicy& policy,
                                     const ThresholdOptions& opts = {});

struct ExponentFit {
    double nu = 0.0;
    double stderr_nu = 0.0;
    double log_a = 0.0;
    double erasure_fraction = 0.0;
    int d = 0;
    std::pair<double, double> window;  // in units of p / p_th
    std::vector<LogicalRateEstimate> points;
};

/// Least-squares slope of log p_L against log p.
ExponentFit fit_exponent_points(const std::vector<LogicalRateEstimate>& points, double p_th,
                                std::pair<double, double> window);

ExponentFit fit_exponent(const NoiseConfig& cfg, int d, double p_th, std::pair<double, double> window, int num_points,
                         const RunPolicy& policy);

/// Biased-noise threshold, reported in total two-qubit infidelity units (2p).
ThresholdEstimate run_biased_comparison(const NoiseConfig& base, double eta, const std::vector<int>& distances,
                                        const std::vector<double>& ps, const RunPolicy& policy,
                                        const ThresholdOptions& opts = {});

/// Spam values below zero mean "p_m equal to p".
std::vector<ThresholdEstimate> run_spam_sweep(const NoiseConfig& base, const std::vector<double>& p_m_values,
                                              const std::vector<int>& distances, const std::vector<double>& ps,
                                              const RunPolicy& policy, const ThresholdOptions& opts = {});

std::vector<double> linspace(double lo, double hi, int n);

void write_rates_csv(std::ostream& out, const std::vector<LogicalRateEstimate>& rows);
nlohmann::json rates_to_json(const std::vector<LogicalRateEstimate>& rows);
nlohmann::json threshold_to_json(const ThresholdEstimate& t);
nlohmann::json exponent_to_json(const ExponentFit& f);

}  // namespace erasure

#endif
