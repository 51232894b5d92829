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

#ifndef ERASURE_LINDBLAD_H
#define ERASURE_LINDBLAD_H

#include <Eigen/Dense>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "erasure/gate_physics.h"

namespace erasure {

using Complex = std::complex<double>;
using Matrix25 = Eigen::Matrix<Complex, 25, 25>;

/// Single-atom levels. |p> is the blackbody-coupled sink, |g> the radiative sink.
enum Level : int { kL0 = 0, kL1 = 1, kLr = 2, kLp = 3, kLg = 4 };
inline int pair_index(int a, int b) { return a * 5 + b; }

struct PulseSegment {
    double duration;
    Complex omega;  // complex Rabi frequency on |1> <-> |r>
    double delta;   // detuning
};

struct PulseSequence {
    std::vector<PulseSegment> segments;
    double duration() const;
};

/// Two equal detuned segments separated by a laser phase jump xi.
PulseSequence lp_pulse(double omega, double delta_over_omega, double tau_omega, double xi);

struct PulseCalibration {
    PulseSequence pulse;
    double delta_over_omega = 0.0;
    double tau_omega = 0.0;
    double xi = 0.0;
    double single_qubit_phase = 0.0;
    double infidelity = 1.0;  // at zero decay rate
};

class CalibrationError : public std::runtime_error {
   public:
    CalibrationError(const std::string& what, double residual) : std::runtime_error(what), residual(residual) {}
    double residual;
};

struct CalibrationOptions {
    double min_blockade_ratio = 100.0;
    double max_infidelity = 1e-4;
    /// Starting point; when unset a coarse grid search picks one.
    bool has_guess = false;
    double guess[3] = {0.0, 0.0, 0.0};
};

/// Optimizes detuning, segment length and phase jump of the LP pulse at zero decay.
PulseCalibration calibrate_pulse(double omega, double v_rr, const CalibrationOptions& opts = {});

/// Zero-decay gate infidelity of LP parameters (delta/Omega, tau*Omega, xi) at
/// blockade ratio V_rr/Omega, maximized over the single-qubit phase.
double lp_infidelity(double delta_over_omega, double tau_omega, double xi, double blockade_ratio,
                     double* best_phase = nullptr);

/// Noiseless amplitudes for a single atom from |1> and for the pair from |11>.
NoiselessTrajectory noiseless_trajectory(const PulseSequence& pulse, double v_rr, int samples = 4001);

struct SubspacePopulations {
    double qq = 0, qr = 0, qb = 0, rb = 0, rr = 0, bb = 0;
    double total() const { return qq + qr + qb + rb + rr + bb; }
};

SubspacePopulations subspace_populations(const Matrix25& rho);

struct IntegratorOptions {
    int steps_per_segment = 200;
    /// When non-null, one CSV row of level populations is written every `record_every` steps.
    std::ostream* series = nullptr;
    int record_every = 10;
};

/// Integrates the two-atom master equation from rho0 over the pulse. Accepts any
/// operator (not only states), since the evolution is linear.
Matrix25 evolve_operator(const PulseSequence& pulse, const GatePhysicsConfig& cfg, const Matrix25& rho0,
                         const IntegratorOptions& opts = {});

struct GateOutcome {
    SubspacePopulations populations;  // averaged over the four computational basis inputs
    double fidelity = 0.0;             // average gate fidelity against CZ
    double conditional_fidelity = 0.0; // given the final state stays in QQ
    double p_stay = 0.0;
    double single_qubit_phase = 0.0;
    double p_e = 0.0;
    double p_f = 0.0;
    double trace_error = 0.0;
    double min_population = 0.0;
};

GateOutcome evolve(const PulseSequence& pulse, const GatePhysicsConfig& cfg, const IntegratorOptions& opts = {});

/// Evolves one initial pure state and reports subspace populations.
SubspacePopulations evolve_state(const PulseSequence& pulse, const GatePhysicsConfig& cfg,
                                 const Eigen::Matrix<Complex, 25, 1>& psi0, const IntegratorOptions& opts = {});

struct SweepPoint {
    double gamma_tg = 0.0;
    double blockade_ratio = 0.0;  // V_rr / Omega
    double calibration_infidelity = 0.0;
    GateOutcome outcome;
    ChannelProbabilities analytic;
    TrajectoryCoefficients coefficients;
};

struct SweepOptions {
    double v_over_gamma = 1e6;
    GatePhysicsConfig base;  // branching fractions are taken from here
    IntegratorOptions integrator;
    int threads = 1;
};

/// Gate error versus Gamma t_g with Omega = 1, recalibrating the pulse at each point.
std::vector<SweepPoint> sweep_gate_error(const std::vector<double>& gamma_tg, const SweepOptions& opts = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace erasure

#endif
