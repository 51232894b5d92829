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

#include "erasure/lindblad.h"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <atomic>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <thread>
#include <unsupported/Eigen/MatrixFunctions>

#include "erasure/constants.h"

namespace erasure {

double PulseSequence::duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
}

PulseSequence lp_pulse(double omega, double delta_over_omega, double tau_omega, double xi) {
    if (!(omega > 0.0) || !(tau_omega > 0.0)) throw std::invalid_argument("omega and tau must be positive");
    PulseSequence p;
    const double tau = tau_omega / omega;
    const double delta = delta_over_omega * omega;
    p.segments.push_back({tau, Complex(omega, 0.0), delta});
    p.segments.push_back({tau, std::polar(omega, xi), delta});
    return p;
}

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Hermitian evolution exp(-i H t) for the small reduced models.
struct SmallPropagator {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig;
    explicit SmallPropagator(const MatrixXcd& h) : eig(h) {}
    VectorXcd apply(const VectorXcd& psi, double t) const {
        VectorXcd c = eig.eigenvectors().adjoint() * psi;
        for (int k = 0; k < c.size(); ++k) c[k] *= std::exp(Complex(0.0, -eig.eigenvalues()[k] * t));
        return eig.eigenvectors() * c;
    }
};

MatrixXcd single_atom_h(const PulseSegment& s) {
    MatrixXcd h(2, 2);
    h << 0.0, std::conj(s.omega) / 2.0, s.omega / 2.0, s.delta;
    return h;
}

// Basis {|11>, |W>, |rr>}. An infinite blockade drops |rr>.
MatrixXcd pair_h(const PulseSegment& s, double v_rr) {
    const Complex g = s.omega * std::sqrt(2.0) / 2.0;
    if (std::isinf(v_rr)) {
        MatrixXcd h(2, 2);
        h << 0.0, std::conj(g), g, s.delta;
        return h;
    }
    MatrixXcd h = MatrixXcd::Zero(3, 3);
    h(1, 0) = g;
    h(0, 1) = std::conj(g);
    h(2, 1) = g;
    h(1, 2) = std::conj(g);
    h(1, 1) = s.delta;
    h(2, 2) = 2.0 * s.delta + v_rr;
    return h;
}

VectorXcd run_small(const PulseSequence& pulse, const std::function<MatrixXcd(const PulseSegment&)>& make_h,
                    VectorXcd psi) {
    for (const auto& s : pulse.segments) psi = SmallPropagator(make_h(s)).apply(psi, s.duration);
    return psi;
}

// Average fidelity of a diagonal two-qubit map with amplitudes d = (d00, d01, d10, d11)
// against CZ dressed by a common single-qubit phase phi.
double diagonal_fidelity(const Complex d[4], double phi) {
    const Complex u[4] = {1.0, std::polar(1.0, phi), std::polar(1.0, phi), -std::polar(1.0, 2.0 * phi)};
    Complex overlap = 0.0;
    double stay = 0.0;
    for (int k = 0; k < 4; ++k) {
        overlap += std::conj(u[k]) * d[k];
        stay += std::norm(d[k]);
    }
    const double f_pro = std::norm(overlap) / 16.0;
    return (4.0 * f_pro + stay / 4.0) / 5.0;
}

// Maximizes f over a periodic phase: grid, then Brent around the best cell.
template <typename F>
double maximize_phase(F f, double* best) {
    constexpr int kGrid = 64;
    const double cell = 2.0 * constants::kPi / kGrid;
    int arg = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kGrid; ++k) {
        const double v = f(k * cell);
        if (v > top) top = v, arg = k;
    }
    auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, (arg - 1) * cell,
                                                   (arg + 1) * cell, 52);
    double phi = r.first;
    if (-r.second < top) phi = arg * cell;
    phi = std::fmod(phi + 2.0 * constants::kPi, 2.0 * constants::kPi);
    if (best) *best = phi;
    return std::max(top, -r.second);
}

}  // namespace

double lp_infidelity(double delta_over_omega, double tau_omega, double xi, double blockade_ratio,
                     double* best_phase) {
    const PulseSequence pulse = lp_pulse(1.0, delta_over_omega, tau_omega, xi);
    VectorXcd one(2);
    one << 1.0, 0.0;
    const VectorXcd a01 = run_small(pulse, single_atom_h, one);
    VectorXcd pair = VectorXcd::Zero(std::isinf(blockade_ratio) ? 2 : 3);
    pair[0] = 1.0;
    const VectorXcd a11 =
        run_small(pulse, [&](const PulseSegment& s) { return pair_h(s, blockade_ratio); }, pair);
    const Complex d[4] = {1.0, a01[0], a01[0], a11[0]};
    const double f = maximize_phase([&](double phi) { return diagonal_fidelity(d, phi); }, best_phase);
    return 1.0 - f;
}

namespace {

struct NmContext {
    double ratio;
};

double nm_objective(const gsl_vector* x, void* params) {
    const auto* ctx = static_cast<const NmContext*>(params);
    const double tau = gsl_vector_get(x, 1);
    if (tau <= 0.0) return 1.0;
    return lp_infidelity(gsl_vector_get(x, 0), tau, gsl_vector_get(x, 2), ctx->ratio);
}

double nelder_mead(double ratio, double x[3], double step) {
    NmContext ctx{ratio};
    gsl_multimin_function fn{&nm_objective, 3, &ctx};
    gsl_vector* start = gsl_vector_alloc(3);
    gsl_vector* steps = gsl_vector_alloc(3);
    for (int k = 0; k < 3; ++k) gsl_vector_set(start, k, x[k]);
    gsl_vector_set(steps, 0, 0.02 * step);
    gsl_vector_set(steps, 1, 0.05 * step);
    gsl_vector_set(steps, 2, 0.1 * step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(s, &fn, start, steps);
    for (int iter = 0; iter < 4000; ++iter) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS) break;
    }
    for (int k = 0; k < 3; ++k) x[k] = gsl_vector_get(s->x, k);
    const double fmin = s->fval;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(start);
    gsl_vector_free(steps);
    return fmin;
}

}  // namespace

PulseCalibration calibrate_pulse(double omega, double v_rr, const CalibrationOptions& opts) {
    if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
    const double ratio = v_rr / omega;
    if (!(ratio >= opts.min_blockade_ratio)) {
        throw std::invalid_argument("blockade ratio V_rr/Omega below the calibration minimum");
    }
    double x[3];
    if (opts.has_guess) {
        std::copy(opts.guess, opts.guess + 3, x);
    } else {
        // Coarse search over the basin of the shortest symmetric solution.
        double best = std::numeric_limits<double>::infinity();
        for (double d = 0.20; d <= 0.60001; d += 0.025) {
            for (double tau = 3.5; tau <= 5.00001; tau += 0.1) {
                for (int k = 0; k < 24; ++k) {
                    const double xi = 2.0 * constants::kPi * k / 24.0;
                    const double v = lp_infidelity(d, tau, xi, ratio);
                    if (v < best) best = v, x[0] = d, x[1] = tau, x[2] = xi;
                }
            }
        }
    }
    double f = nelder_mead(ratio, x, 1.0);
    f = nelder_mead(ratio, x, 0.1);  // restart to escape a collapsed simplex
    PulseCalibration cal;
    cal.delta_over_omega = x[0];
    cal.tau_omega = x[1];
    cal.xi = std::fmod(std::fmod(x[2], 2.0 * constants::kPi) + 2.0 * constants::kPi, 2.0 * constants::kPi);
    cal.infidelity = lp_infidelity(x[0], x[1], cal.xi, ratio, &cal.single_qubit_phase);
    cal.pulse = lp_pulse(omega, cal.delta_over_omega, cal.tau_omega, cal.xi);
    (void)f;
    if (!(cal.infidelity < opts.max_infidelity)) {
        throw CalibrationError("pulse calibration did not converge, residual infidelity " +
                                   std::to_string(cal.infidelity),
                               cal.infidelity);
    }
    return cal;
}

NoiselessTrajectory noiseless_trajectory(const PulseSequence& pulse, double v_rr, int samples) {
    if (samples < 3) throw std::invalid_argument("need at least three samples");
    const double tg = pulse.duration();
    NoiselessTrajectory tr;
    tr.t.resize(samples);
    tr.psi_r.resize(samples);
    tr.psi_w.resize(samples);
    tr.psi_rr.resize(samples);
    const bool blockaded = std::isinf(v_rr);
    VectorXcd single(2), pair = VectorXcd::Zero(blockaded ? 2 : 3);
    single << 1.0, 0.0;
    pair[0] = 1.0;
    size_t seg = 0;
    double seg_start = 0.0;
    auto props = [&](size_t k) {
        return std::pair<SmallPropagator, SmallPropagator>(SmallPropagator(single_atom_h(pulse.segments[k])),
                                                            SmallPropagator(pair_h(pulse.segments[k], v_rr)));
    };
    auto current = props(0);
    for (int i = 0; i < samples; ++i) {
        const double t = tg * i / (samples - 1);
        while (seg + 1 < pulse.segments.size() && t > seg_start + pulse.segments[seg].duration) {
            const double dur = pulse.segments[seg].duration;
            single = current.first.apply(single, dur);
            pair = current.second.apply(pair, dur);
            seg_start += dur;
            current = props(++seg);
        }
        const VectorXcd s = current.first.apply(single, t - seg_start);
        const VectorXcd p = current.second.apply(pair, t - seg_start);
        tr.t[i] = t;
        tr.psi_r[i] = s[1];
        tr.psi_w[i] = p[1];
        tr.psi_rr[i] = blockaded ? Complex(0.0) : p[2];
    }
    return tr;
}

namespace {

enum Subspace { kQ, kR, kB };

Subspace subspace_of(int level) {
    if (level == kL0 || level == kL1) return kQ;
    if (level == kLg) return kR;
    return kB;
}

Matrix25 hamiltonian(const PulseSegment& s, const GatePhysicsConfig& cfg) {
    Matrix25 h = Matrix25::Zero();
    const Complex half_decay(0.0, -cfg.gamma / 2.0);
    for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
            const int i = pair_index(a, b);
            const int nr = (a == kLr) + (b == kLr);
            h(i, i) = static_cast<double>(nr) * (s.delta + half_decay);
            if (a == kLr && b == kLr) h(i, i) += cfg.v_rr;
            if (a == kLp && b == kLp) h(i, i) += cfg.v_pp;
            if (a == kL1) {
                h(pair_index(kLr, b), i) += s.omega / 2.0;
                h(i, pair_index(kLr, b)) += std::conj(s.omega) / 2.0;
            }
            if (b == kL1) {
                h(pair_index(a, kLr), i) += s.omega / 2.0;
                h(i, pair_index(a, kLr)) += std::conj(s.omega) / 2.0;
            }
        }
    }
    h(pair_index(kLr, kLp), pair_index(kLp, kLr)) = cfg.v_rp;
    h(pair_index(kLp, kLr), pair_index(kLr, kLp)) = cfg.v_rp;
    return h;
}

// Recycling part of the dissipator: sum over jumps |target><r| on either atom.
Matrix25 jumps(const Matrix25& rho, const GatePhysicsConfig& cfg) {
    const std::pair<int, double> channels[] = {
        {kLg, cfg.gamma_r()}, {kLp, cfg.gamma_b()}, {kL0, cfg.gamma_q() / 2.0}, {kL1, cfg.gamma_q() / 2.0}};
    Matrix25 out = Matrix25::Zero();
    for (const auto& [target, rate] : channels) {
        if (rate == 0.0) continue;
        for (int x = 0; x < 5; ++x) {
            for (int y = 0; y < 5; ++y) {
                out(pair_index(target, x), pair_index(target, y)) += rate * rho(pair_index(kLr, x), pair_index(kLr, y));
                out(pair_index(x, target), pair_index(y, target)) += rate * rho(pair_index(x, kLr), pair_index(y, kLr));
            }
        }
    }
    return out;
}

void write_series_row(std::ostream& out, double t, const Matrix25& rho) {
    const SubspacePopulations p = subspace_populations(rho);
    out << std::setprecision(6) << t << ',' << p.qq << ',' << p.qr << ',' << p.qb << ',' << p.rb << ',' << p.rr
        << ',' << p.bb << ',' << rho.trace().real() << '\n';
}

}  // namespace

SubspacePopulations subspace_populations(const Matrix25& rho) {
    SubspacePopulations p;
    for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
            const double v = rho(pair_index(a, b), pair_index(a, b)).real();
            const Subspace x = subspace_of(a), y = subspace_of(b);
            const int lo = std::min(x, y), hi = std::max(x, y);
            if (lo == kQ && hi == kQ) p.qq += v;
            else if (lo == kQ && hi == kR) p.qr += v;
            else if (lo == kQ && hi == kB) p.qb += v;
            else if (lo == kR && hi == kB) p.rb += v;
            else if (lo == kR && hi == kR) p.rr += v;
            else p.bb += v;
        }
    }
    return p;
}

Matrix25 evolve_operator(const PulseSequence& pulse, const GatePhysicsConfig& cfg, const Matrix25& rho0,
                         const IntegratorOptions& opts) {
    cfg.validate();
    if (opts.steps_per_segment < 1) throw std::invalid_argument("steps_per_segment must be positive");
    // Integrating-factor RK4: the non-Hermitian Hamiltonian part, which carries the stiff
    // blockade shift, is propagated exactly and only the jump term is stepped.
    Matrix25 rho = rho0;
    double t = 0.0;
    long step = 0;
    if (opts.series) write_series_row(*opts.series, t, rho);
    for (const auto& seg : pulse.segments) {
        const double h = seg.duration / opts.steps_per_segment;
        if (!(h > 0.0)) throw std::runtime_error("integration step underflow");
        const Matrix25 hm = hamiltonian(seg, cfg);
        const Matrix25 full = (Complex(0.0, -h) * hm).exp();
        const Matrix25 half = (Complex(0.0, -h / 2.0) * hm).exp();
        auto prop_full = [&](const Matrix25& x) -> Matrix25 { return full * x * full.adjoint(); };
        auto prop_half = [&](const Matrix25& x) -> Matrix25 { return half * x * half.adjoint(); };
        for (int n = 0; n < opts.steps_per_segment; ++n) {
            const Matrix25 k1 = jumps(rho, cfg);
            const Matrix25 rho_half = prop_half(rho);
            const Matrix25 k2 = jumps(prop_half(rho + (h / 2.0) * k1), cfg);
            const Matrix25 k3 = jumps(rho_half + (h / 2.0) * k2, cfg);
            const Matrix25 k4 = jumps(prop_full(rho) + h * prop_half(k3), cfg);
            rho = prop_full(rho) + (h / 6.0) * (prop_full(k1) + 2.0 * prop_half(k2 + k3) + k4);
            t += h;
            ++step;
            if (opts.series && step % opts.record_every == 0) write_series_row(*opts.series, t, rho);
        }
    }
    return rho;
}

namespace {

const int kComputational[4] = {pair_index(kL0, kL0), pair_index(kL0, kL1), pair_index(kL1, kL0),
                               pair_index(kL1, kL1)};

constexpr double kTraceTolerance = 1e-6;

void check_trace(const Matrix25& rho, double expected) {
    if (std::abs(rho.trace().real() - expected) > kTraceTolerance) {
        throw std::runtime_error("trace drift exceeds tolerance");
    }
}

}  // namespace

SubspacePopulations evolve_state(const PulseSequence& pulse, const GatePhysicsConfig& cfg,
                                 const Eigen::Matrix<Complex, 25, 1>& psi0, const IntegratorOptions& opts) {
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-9) throw std::invalid_argument("initial state must be normalized");
    if (opts.series) *opts.series << "t,qq,qr,qb,rb,rr,bb,trace\n";
    const Matrix25 rho = evolve_operator(pulse, cfg, psi0 * psi0.adjoint(), opts);
    check_trace(rho, 1.0);
    return subspace_populations(rho);
}

GateOutcome evolve(const PulseSequence& pulse, const GatePhysicsConfig& cfg, const IntegratorOptions& opts) {
    IntegratorOptions quiet = opts;
    quiet.series = nullptr;
    GateOutcome out;
    out.min_population = std::numeric_limits<double>::infinity();
    Complex m[4][4];
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            Matrix25 op = Matrix25::Zero();
            op(kComputational[k], kComputational[l]) = 1.0;
            const Matrix25 r = evolve_operator(pulse, cfg, op, quiet);
            m[k][l] = r(kComputational[k], kComputational[l]);
            if (k != l) continue;
            check_trace(r, 1.0);
            out.trace_error = std::max(out.trace_error, std::abs(r.trace().real() - 1.0));
            out.min_population = std::min(out.min_population, r.diagonal().real().minCoeff());
            const SubspacePopulations p = subspace_populations(r);
            out.populations.qq += p.qq / 4.0;
            out.populations.qr += p.qr / 4.0;
            out.populations.qb += p.qb / 4.0;
            out.populations.rb += p.rb / 4.0;
            out.populations.rr += p.rr / 4.0;
            out.populations.bb += p.bb / 4.0;
        }
    }
    out.p_stay = out.populations.qq;
    auto fidelity = [&](double phi) {
        const Complex u[4] = {1.0, std::polar(1.0, phi), std::polar(1.0, phi), -std::polar(1.0, 2.0 * phi)};
        Complex acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) acc += std::conj(u[k]) * u[l] * m[k][l];
        }
        return (4.0 * acc.real() / 16.0 + out.p_stay) / 5.0;
    };
    out.fidelity = maximize_phase(fidelity, &out.single_qubit_phase);
    out.conditional_fidelity = out.fidelity / out.p_stay;
    const SubspacePopulations& p = out.populations;
    out.p_e = p.qr + p.qb + p.rb + p.rr;
    out.p_f = p.bb;
    return out;
}

std::vector<SweepPoint> sweep_gate_error(const std::vector<double>& gamma_tg, const SweepOptions& opts) {
    std::vector<SweepPoint> points(gamma_tg.size());
    std::vector<GatePhysicsConfig> cfgs(gamma_tg.size());
    std::vector<PulseSequence> pulses(gamma_tg.size());
    // Calibrations chain from one point to the next; the blockade shrinks with the
    // decay rate, so small Gamma t_g runs below the usual calibration minimum.
    CalibrationOptions cal_opts;
    cal_opts.min_blockade_ratio = 1.0;
    PulseCalibration cal = calibrate_pulse(1.0, 1e3);
    for (size_t i = 0; i < gamma_tg.size(); ++i) {
        if (!(gamma_tg[i] > 0.0)) throw std::invalid_argument("Gamma t_g must be positive");
        double tg = cal.tau_omega * 2.0;
        for (int iter = 0; iter < 3; ++iter) {
            const double v = opts.v_over_gamma * gamma_tg[i] / tg;
            cal_opts.has_guess = true;
            cal_opts.guess[0] = cal.delta_over_omega;
            cal_opts.guess[1] = cal.tau_omega;
            cal_opts.guess[2] = cal.xi;
            cal = calibrate_pulse(1.0, v, cal_opts);
            tg = cal.pulse.duration();
        }
        GatePhysicsConfig cfg = opts.base;
        cfg.omega = 1.0;
        cfg.t_g = tg;
        cfg.gamma = gamma_tg[i] / tg;
        cfg.v_rr = cfg.v_rp = cfg.v_pp = opts.v_over_gamma * cfg.gamma;
        cfgs[i] = cfg;
        pulses[i] = cal.pulse;
        points[i].gamma_tg = gamma_tg[i];
        points[i].blockade_ratio = cfg.v_rr;
        points[i].calibration_infidelity = cal.infidelity;
        points[i].coefficients =
            trajectory_coefficients(noiseless_trajectory(cal.pulse, cfg.v_rr), 1.0, cfg.v_rr, cfg.v_rp);
        points[i].analytic = channel_probabilities(cfg, points[i].coefficients);
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (size_t i = next++; i < points.size(); i = next++) {
            try {
                points[i].outcome = evolve(pulses[i], cfgs[i], opts.integrator);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(points.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return points;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
    out << "gamma_tg,blockade_ratio,one_minus_f,p_e,one_minus_f_cond,p_f,p_qr,p_qb,p_rb,p_rr,p_bb,"
           "analytic_p_qr,analytic_p_qb,analytic_p_rb,analytic_p_rr,analytic_p_bb,analytic_p_e,"
           "calibration_infidelity\n";
    out << std::setprecision(6);
    for (const auto& pt : points) {
        const GateOutcome& o = pt.outcome;
        const SubspacePopulations& p = o.populations;
        const ChannelProbabilities& a = pt.analytic;
        out << pt.gamma_tg << ',' << pt.blockade_ratio << ',' << 1.0 - o.fidelity << ',' << o.p_e << ','
            << 1.0 - o.conditional_fidelity << ',' << o.p_f << ',' << p.qr << ',' << p.qb << ',' << p.rb << ','
            << p.rr << ',' << p.bb << ',' << a.p_qr << ',' << a.p_qb << ',' << a.p_rb << ',' << a.p_rr << ','
            << a.p_bb << ',' << a.p_e << ',' << pt.calibration_infidelity << '\n';
    }
}

}  // namespace erasure
