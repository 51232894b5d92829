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

#ifndef ERASURE_GATE_PHYSICS_H
#define ERASURE_GATE_PHYSICS_H

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

namespace erasure {

/// Rates are angular frequencies in arbitrary but consistent units (1/time).
struct GatePhysicsConfig {
    double gamma = 1e-3;  // total Rydberg decay rate
    double frac_b = 0.61;  // blackbody transfer to |p>
    double frac_r = 0.34;  // radiative decay out of the qubit subspace
    double frac_q = 0.05;  // radiative decay back to |0> or |1>
    double omega = 1.0;
    double v_rr = 1e3;
    double v_rp = 1e3;
    double v_pp = 1e3;
    double t_g = 8.586;

    double gamma_b() const { return gamma * frac_b; }
    double gamma_r() const { return gamma * frac_r; }
    double gamma_q() const { return gamma * frac_q; }
    void validate() const;
};

/// Noiseless amplitudes on a uniform time grid over [0, t_g].
struct NoiselessTrajectory {
    std::vector<double> t;
    std::vector<std::complex<double>> psi_r;   // |1> -> |r> for a single driven atom
    std::vector<std::complex<double>> psi_w;   // |11> -> |W>
    std::vector<std::complex<double>> psi_rr;  // |11> -> |rr>
};

struct TrajectoryCoefficients {
    double alpha = 0.0;
    double r01 = 0.0;
    double beta = 0.0;
    double r11 = 0.0;
    double r11_prime = 0.0;
    double beta_prime = 0.0;
    double beta_double = 0.0;      // beta * Omega^2 / (2 V_rr^2)
    double beta_double_traj = 0.0; // time-averaged |psi_rr|^2 from the trajectory
    double s = 0.0;                // Omega^2 / (2 V_rp^2)
};

TrajectoryCoefficients trajectory_coefficients(const NoiselessTrajectory& traj, double omega, double v_rr,
                                               double v_rp);

struct ChannelProbabilities {
    double p_qr = 0.0;
    double p_qb = 0.0;
    double p_rb = 0.0;
    double p_rr = 0.0;
    double p_bb = 0.0;
    double p_e = 0.0;
    double p_f = 0.0;
    /// Infidelity of the gate given no detected erasure, from the decay events that
    /// return to the qubit subspace plus the no-jump term.
    double p_p = 0.0;
    /// Probability of those decay events themselves, without fidelity weighting.
    double p_p_events = 0.0;
    double r_e = 0.0;
};

struct BasisDistribution {
    double p00 = 0.25;
    double p01 = 0.5;  // |01> or |10>
    double p11 = 0.25;
};

ChannelProbabilities channel_probabilities(const GatePhysicsConfig& cfg, const TrajectoryCoefficients& c,
                                           const BasisDistribution& dist = {});

double no_jump_infidelity(double p_e);

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}, arguments given as twice the angular momentum.
double wigner_6j_twice(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6);
double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);

struct BranchingFinalState {
    std::string label;
    double j;
    double l;
    double omega;  // transition angular frequency, any consistent unit
};

struct BranchingInput {
    double l_initial;
    double s;
    double j_initial;
    std::vector<BranchingFinalState> finals;
};

/// Fractions of an electric-dipole decay into each final fine-structure level.
std::vector<double> branching_ratios(const BranchingInput& in);

/// Reads initial and final levels from a key=value file with level energies in cm^-1.
BranchingInput load_branching_input(const std::string& path);

struct DetectionBudgetConfig {
    double gamma_img = 2 * 3.14159265358979323846 * 28e6;  // 1/s
    double wavelength = 399e-9;                           // m
    double mass_amu = 171.0;
    double n_photons = 200.0;
    double v0 = 3.5;                                   // m/s, initial ion velocity spread
    double electric_field = 0.1;                       // V/m
    double charge = 1.602176634e-19;                   // C
    double spacing = 4e-6;                             // m

    void validate() const;
};

/// rms displacement of a neutral atom after scattering photons for time t (s).
double neutral_atom_spread(const DetectionBudgetConfig& cfg, double t);

/// Position spread figure of merit 1/(m lambda Gamma), SI units.
double imaging_spread_metric(const DetectionBudgetConfig& cfg);

struct IonSpread {
    double rms;    // m
    double drift;  // m, displacement from a uniform field over the imaging time
};

IonSpread ion_spread(const DetectionBudgetConfig& cfg, double n_photons);

struct CycleTimeConfig {
    double t_g = 1e-6;
    double t_e = 10e-6;
    double t_r = 0.0;
    double t_m = 0.0;
    double f_p = 0.1;
};

double cycle_time(const CycleTimeConfig& cfg);

nlohmann::json coefficients_to_json(const TrajectoryCoefficients& c);
nlohmann::json channels_to_json(const ChannelProbabilities& p);

}  // namespace erasure

#endif
