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

#include "erasure/gate_physics.h"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <stdexcept>

#include "erasure/constants.h"

namespace erasure {

void GatePhysicsConfig::validate() const {
    if (!(gamma >= 0.0) || !(omega > 0.0) || !(t_g > 0.0)) {
        throw std::invalid_argument("gamma must be >= 0, omega and t_g > 0");
    }
    if (frac_b < 0 || frac_r < 0 || frac_q < 0 || std::abs(frac_b + frac_r + frac_q - 1.0) > 1e-6) {
        throw std::invalid_argument("branching fractions must be non-negative and sum to 1");
    }
    if (!(v_rr > 0.0) || !(v_rp > 0.0) || !(v_pp >= 0.0)) {
        throw std::invalid_argument("interaction strengths must be positive");
    }
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    double s = 0.0;
    for (size_t i = 1; i < t.size(); i++) {
        s += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    }
    return s;
}

std::vector<double> populations(const std::vector<std::complex<double>>& amps, size_t n) {
    std::vector<double> out(n, 0.0);
    for (size_t i = 0; i < std::min(n, amps.size()); i++) {
        out[i] = std::norm(amps[i]);
        if (out[i] > 1.0 + 1e-6) {
            throw std::invalid_argument("trajectory amplitudes are not normalized");
        }
    }
    return out;
}

}  // namespace

TrajectoryCoefficients trajectory_coefficients(const NoiselessTrajectory& traj, double omega, double v_rr,
                                               double v_rp) {
    const size_t n = traj.t.size();
    if (n < 3) {
        throw std::invalid_argument("trajectory needs at least three samples");
    }
    const double tg = traj.t.back() - traj.t.front();
    const double dt = tg / static_cast<double>(n - 1);
    for (size_t i = 1; i < n; i++) {
        if (std::abs(traj.t[i] - traj.t[i - 1] - dt) > 1e-9 * tg) {
            throw std::invalid_argument("trajectory must be sampled on a uniform grid");
        }
    }
    const auto r = populations(traj.psi_r, n);
    const auto w = populations(traj.psi_w, n);
    const auto rr = populations(traj.psi_rr, n);
    std::vector<double> f(n);
    auto reversed = [n](const std::vector<double>& v, size_t i) { return v[n - 1 - i]; };

    TrajectoryCoefficients c;
    c.alpha = trapezoid(traj.t, r) / tg;
    c.beta = trapezoid(traj.t, w) / tg;
    c.beta_double_traj = trapezoid(traj.t, rr) / tg;
    if (c.alpha > 0) {
        for (size_t i = 0; i < n; i++) {
            f[i] = r[i] * reversed(r, i);
        }
        c.r01 = trapezoid(traj.t, f) / (tg * c.alpha);
    }
    if (c.beta > 0) {
        for (size_t i = 0; i < n; i++) {
            f[i] = w[i] * reversed(r, i);
        }
        c.r11 = trapezoid(traj.t, f) / (tg * c.beta);
        for (size_t i = 0; i < n; i++) {
            f[i] = w[i] * reversed(w, i);
        }
        c.r11_prime = trapezoid(traj.t, f) / (tg * c.beta);
        // Mean Rydberg population of the surviving atom after a decay at t: the
        // survivor restarts from |1> and is driven for the remaining t_g - t.
        std::vector<double> cum(n, 0.0);
        for (size_t i = 1; i < n; i++) {
            cum[i] = cum[i - 1] + 0.5 * (r[i] + r[i - 1]) * dt;
        }
        for (size_t i = 0; i < n; i++) {
            f[i] = w[i] * reversed(cum, i) / tg;
        }
        c.beta_prime = trapezoid(traj.t, f) / (tg * c.beta);
    }
    c.beta_double = c.beta * omega * omega / (2 * v_rr * v_rr);
    c.s = omega * omega / (2 * v_rp * v_rp);
    return c;
}

double no_jump_infidelity(double p_e) {
    if (!(p_e >= 0.0 && p_e <= 1.0)) {
        throw std::invalid_argument("p_e must lie in [0, 1]");
    }
    return (p_e / 4) * (p_e / 4);
}

ChannelProbabilities channel_probabilities(const GatePhysicsConfig& cfg, const TrajectoryCoefficients& c,
                                           const BasisDistribution& dist) {
    cfg.validate();
    if (dist.p00 < 0 || dist.p01 < 0 || dist.p11 < 0 || std::abs(dist.p00 + dist.p01 + dist.p11 - 1.0) > 1e-9) {
        throw std::invalid_argument("basis distribution must be non-negative and sum to 1");
    }
    const double tg = cfg.t_g;
    const double gb = cfg.gamma_b(), gr = cfg.gamma_r(), gq = cfg.gamma_q();
    ChannelProbabilities p;
    p.p_qr = dist.p01 * gr * c.alpha * tg + dist.p11 * gr * c.beta * tg * (1 - c.r11);
    p.p_qb = dist.p01 * (gb * c.alpha * tg + 0.5 * gq * c.alpha * tg * c.r01) +
             dist.p11 * (gb * c.beta * tg * (1 - c.s) + gq * c.beta * tg * (c.r11 + c.r11_prime) / 2);
    p.p_rb = dist.p11 * gr * c.beta * tg * c.r11;
    p.p_rr = dist.p11 * (gr * tg) * (gr * tg) * c.beta * c.beta_prime;
    p.p_bb = dist.p11 * (2 * gb * c.beta_double * tg + gb * c.beta * tg * c.s);
    p.p_e = p.p_qr + p.p_qb + p.p_rb + p.p_rr;
    p.p_f = p.p_bb;

    // Decays that land back in the qubit subspace without re-excitation. From |01>,
    // half go to |00> and half to |01>; from |11>, half go to |01>/|10> and half to |11>.
    const double q01_other = dist.p01 * 0.5 * gq * c.alpha * tg;
    const double q01_same = dist.p01 * 0.5 * gq * c.alpha * tg * (1 - c.r01);
    const double q11_other = dist.p11 * 0.5 * gq * c.beta * tg * (1 - c.r11);
    const double q11_same = dist.p11 * 0.5 * gq * c.beta * tg * (1 - c.r11_prime);
    const double nj = no_jump_infidelity(std::min(1.0, p.p_e));
    p.p_p_events = q01_other + q01_same + q11_other + q11_same + nj;
    // Average-fidelity cost of an incoherent jump in a d = 4 space: d/(d+1) when the
    // state ends in a different basis state, (d-1)/(d+1) when it only loses its phase.
    constexpr double kOther = 4.0 / 5.0;
    constexpr double kSame = 3.0 / 5.0;
    p.p_p = kOther * (q01_other + q11_other) + kSame * (q01_same + q11_same) + nj;
    p.r_e = p.p_e + p.p_p > 0 ? p.p_e / (p.p_e + p.p_p) : 0.0;
    return p;
}

namespace {

double log_factorial(int n) {
    if (n < 0) {
        throw std::invalid_argument("negative factorial argument");
    }
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// Triangle condition and log of the Racah delta coefficient, arguments doubled.
bool triangle(int a, int b, int c) {
    return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0;
}

double log_delta(int a, int b, int c) {
    return 0.5 * (log_factorial((a + b - c) / 2) + log_factorial((a - b + c) / 2) + log_factorial((-a + b + c) / 2) -
                  log_factorial((a + b + c) / 2 + 1));
}

}  // namespace

double wigner_6j_twice(int a, int b, int c, int d, int e, int f) {
    for (int x : {a, b, c, d, e, f}) {
        if (x < 0) {
            throw std::invalid_argument("angular momenta must be non-negative");
        }
    }
    if (!triangle(a, b, c) || !triangle(a, e, f) || !triangle(d, b, f) || !triangle(d, e, c)) {
        return 0.0;
    }
    const double pre = log_delta(a, b, c) + log_delta(a, e, f) + log_delta(d, b, f) + log_delta(d, e, c);
    const int t_min = std::max({a + b + c, a + e + f, d + b + f, d + e + c}) / 2;
    const int t_max = std::min({a + b + d + e, a + c + d + f, b + c + e + f}) / 2;
    double sum = 0.0;
    for (int t = t_min; t <= t_max; t++) {
        double lg = log_factorial(t + 1) - log_factorial(t - (a + b + c) / 2) - log_factorial(t - (a + e + f) / 2) -
                    log_factorial(t - (d + b + f) / 2) - log_factorial(t - (d + e + c) / 2) -
                    log_factorial((a + b + d + e) / 2 - t) - log_factorial((a + c + d + f) / 2 - t) -
                    log_factorial((b + c + e + f) / 2 - t);
        sum += ((t % 2) ? -1.0 : 1.0) * std::exp(lg + pre);
    }
    return sum;
}

double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6) {
    auto twice = [](double j) {
        double t = 2 * j;
        if (std::abs(t - std::round(t)) > 1e-9) {
            throw std::invalid_argument("angular momentum must be a multiple of 1/2");
        }
        return static_cast<int>(std::lround(t));
    };
    return wigner_6j_twice(twice(j1), twice(j2), twice(j3), twice(j4), twice(j5), twice(j6));
}

std::vector<double> branching_ratios(const BranchingInput& in) {
    if (in.finals.empty()) {
        throw std::invalid_argument("no final states");
    }
    std::vector<double> rates;
    double total = 0.0;
    for (const auto& f : in.finals) {
        if (!(f.omega > 0.0)) {
            throw std::invalid_argument("transition frequency must be positive for " + f.label);
        }
        const int tl = static_cast<int>(std::lround(2 * f.l)), tlp = static_cast<int>(std::lround(2 * in.l_initial));
        const int tj = static_cast<int>(std::lround(2 * f.j)), tjp = static_cast<int>(std::lround(2 * in.j_initial));
        const int ts = static_cast<int>(std::lround(2 * in.s));
        if (!triangle(tl, tlp, 2) || !triangle(tjp, tj, 2) || !triangle(tl, tj, ts) || !triangle(tlp, tjp, ts)) {
            throw std::invalid_argument("triangle rule violated for final state " + f.label);
        }
        const double sixj = wigner_6j_twice(tl, tlp, 2, tjp, tj, ts);
        const double rate = std::pow(f.omega, 3) * (2 * f.j + 1) * (2 * in.l_initial + 1) * sixj * sixj;
        rates.push_back(rate);
        total += rate;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("all branching rates vanish");
    }
    for (double& r : rates) {
        r /= total;
    }
    return rates;
}

BranchingInput load_branching_input(const std::string& path) {
    boost::property_tree::ptree tree;
    boost::property_tree::read_ini(path, tree);
    BranchingInput in;
    const auto& init = tree.get_child("initial");
    in.l_initial = init.get<double>("L");
    in.s = init.get<double>("S");
    in.j_initial = init.get<double>("J");
    const double e0 = init.get<double>("energy_cm");
    for (const auto& [name, sec] : tree) {
        if (name.rfind("final:", 0) != 0) {
            continue;
        }
        BranchingFinalState f;
        f.label = name.substr(6);
        f.l = sec.get<double>("L");
        f.j = sec.get<double>("J");
        // Angular frequency in units of 2 pi c x (1 cm^-1); the common factor cancels.
        f.omega = e0 - sec.get<double>("energy_cm");
        in.finals.push_back(f);
    }
    return in;
}

void DetectionBudgetConfig::validate() const {
    for (double v : {gamma_img, wavelength, mass_amu, charge, spacing}) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("detection budget parameters must be positive");
        }
    }
    if (n_photons < 0 || v0 < 0 || electric_field < 0) {
        throw std::invalid_argument("detection budget parameters must be non-negative");
    }
}

double neutral_atom_spread(const DetectionBudgetConfig& cfg, double t) {
    cfg.validate();
    if (t < 0) {
        throw std::invalid_argument("time must be non-negative");
    }
    const double m = cfg.mass_amu * constants::kAtomicMassUnit;
    const double k = 2 * constants::kPi / cfg.wavelength;
    return std::sqrt(constants::kHbar * constants::kHbar * k * k * t * t * t * cfg.gamma_img / (18 * m * m));
}

double imaging_spread_metric(const DetectionBudgetConfig& cfg) {
    cfg.validate();
    return 1.0 / (cfg.mass_amu * constants::kAtomicMassUnit * cfg.wavelength * cfg.gamma_img);
}

IonSpread ion_spread(const DetectionBudgetConfig& cfg, double n_photons) {
    cfg.validate();
    if (n_photons < 0) {
        throw std::invalid_argument("photon number must be non-negative");
    }
    const double m = cfg.mass_amu * constants::kAtomicMassUnit;
    const double t = 2 * n_photons / cfg.gamma_img;
    return {cfg.v0 * t, cfg.charge * cfg.electric_field / (2 * m) * t * t};
}

double cycle_time(const CycleTimeConfig& cfg) {
    if (!(cfg.f_p > 0.0 && cfg.f_p <= 1.0)) {
        throw std::invalid_argument("parallel fraction must lie in (0, 1]");
    }
    if (cfg.t_g < 0 || cfg.t_e < 0 || cfg.t_r < 0 || cfg.t_m < 0) {
        throw std::invalid_argument("durations must be non-negative");
    }
    return (cfg.t_g + cfg.t_e) / cfg.f_p + cfg.t_r + cfg.t_m;
}

nlohmann::json coefficients_to_json(const TrajectoryCoefficients& c) {
    return {{"alpha", c.alpha},         {"R01", c.r01},       {"beta", c.beta},
            {"R11", c.r11},             {"R11_prime", c.r11_prime}, {"beta_prime", c.beta_prime},
            {"beta_double", c.beta_double}, {"S", c.s}};
}

nlohmann::json channels_to_json(const ChannelProbabilities& p) {
    return {{"P_QR", p.p_qr}, {"P_QB", p.p_qb}, {"P_RB", p.p_rb}, {"P_RR", p.p_rr},
            {"P_BB", p.p_bb}, {"p_e", p.p_e},   {"p_f", p.p_f},   {"p_p", p.p_p},
            {"p_p_events", p.p_p_events},       {"R_e", p.r_e}};
}

}  // namespace erasure
