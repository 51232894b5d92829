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

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <thread>

#include "erasure/uf_decoder.h"

namespace erasure {

std::pair<double, double> wilson_interval(uint64_t failures, uint64_t trials, double z) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(failures) / n;
    const double z2 = z * z;
    const double denom = 1 + z2 / n;
    const double centre = (ph + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / denom;
    // The bounds are exact at the extremes; rounding would otherwise leave a 1e-19 residue.
    const double lo = failures == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = failures == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

MemoryExperiment::MemoryExperiment(int distance, const NoiseConfig& cfg, GateOrder order)
    : cfg_(cfg),
      lattice_(build_lattice({distance, 0})),
      schedule_(build_schedule(lattice_, order)),
      layout_(CircuitLayout::build(lattice_, schedule_, distance)),
      table_(lattice_, schedule_, layout_) {
    cfg_.validate();
    if (cfg_.p > 0.0) {
        graph_ = build_graph(lattice_, layout_, table_, cfg_);
    }
}

uint64_t MemoryExperiment::run_chunk(uint64_t first, uint64_t count) const {
    if (cfg_.p <= 0.0 && cfg_.spam_probability() <= 0.0) {
        return 0;
    }
    if (cfg_.p <= 0.0) {
        throw std::invalid_argument("decoding graph needs p > 0");
    }
    UnionFindDecoder decoder(graph_);
    TrialFaults faults;
    std::vector<uint8_t> flags(layout_.num_detectors(), 0);
    std::vector<uint32_t> touched;
    std::vector<uint32_t> defects;
    uint64_t failures = 0;
    for (uint64_t t = first; t < first + count; t++) {
        Rng rng(cfg_.seed, t);
        sample_trial_faults(cfg_, layout_, rng, faults);
        touched.clear();
        uint8_t truth = table_.accumulate(faults, flags, touched);
        defects.clear();
        for (uint32_t v : touched) {
            if (flags[v]) {
                flags[v] = 0;
                defects.push_back(v);
            }
        }
        if (defects.empty() && faults.erasures.size() == 0) {
            failures += truth != 0;
            continue;
        }
        std::sort(defects.begin(), defects.end());
        ErasureOverlay overlay = overlay_erasures(graph_, faults.erasures);
        DecodeResult r = decoder.decode(defects, overlay);
        failures += r.logical_parity != truth;
    }
    return failures;
}

LogicalRateEstimate estimate_logical_rate(const NoiseConfig& cfg, int d, const RunPolicy& policy) {
    if (policy.max_trials < 1 || policy.chunk < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    MemoryExperiment exp(d, cfg);
    const unsigned threads = std::max(1u, policy.threads);
    uint64_t trials = 0;
    uint64_t failures = 0;
    bool done = false;
    while (!done) {
        std::vector<std::pair<uint64_t, uint64_t>> chunks;
        for (unsigned i = 0; i < threads; i++) {
            uint64_t first = trials + i * policy.chunk;
            if (first >= policy.max_trials) {
                break;
            }
            chunks.emplace_back(first, std::min(policy.chunk, policy.max_trials - first));
        }
        std::vector<uint64_t> found(chunks.size(), 0);
        if (chunks.size() == 1) {
            found[0] = exp.run_chunk(chunks[0].first, chunks[0].second);
        } else {
            std::vector<std::thread> pool;
            for (size_t i = 0; i < chunks.size(); i++) {
                pool.emplace_back([&, i] { found[i] = exp.run_chunk(chunks[i].first, chunks[i].second); });
            }
            for (auto& th : pool) {
                th.join();
            }
        }
        // Reduce in chunk order and stop at the first chunk boundary that meets the target.
        for (size_t i = 0; i < chunks.size(); i++) {
            trials += chunks[i].second;
            failures += found[i];
            if (failures >= policy.min_failures || trials >= policy.max_trials) {
                done = true;
                break;
            }
        }
    }
    LogicalRateEstimate est;
    est.d = d;
    est.p = cfg.p;
    est.erasure_fraction = cfg.erasure_fraction;
    est.p_m = cfg.spam_probability();
    est.eta = cfg.mode == NoiseMode::Biased ? cfg.eta : 0.0;
    est.trials = trials;
    est.failures = failures;
    est.p_L = static_cast<double>(failures) / static_cast<double>(trials);
    std::tie(est.ci_low, est.ci_high) = wilson_interval(failures, trials);
    return est;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; i++) {
        out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    return out;
}

namespace {

struct FitPoint {
    double p;
    int d;
    double y;
    double weight;
};

std::vector<FitPoint> fit_points(const std::vector<LogicalRateEstimate>& points,
                                 const std::vector<uint64_t>& failures) {
    std::vector<FitPoint> out;
    for (size_t i = 0; i < points.size(); i++) {
        const double n = static_cast<double>(points[i].trials);
        const double f = static_cast<double>(failures[i]);
        const double y = f / n;
        // Variance with add-one smoothing so empty bins keep a finite weight.
        const double var = (f + 1) * (n - f + 1) / ((n + 2) * (n + 2) * n);
        out.push_back({points[i].p, points[i].d, y, 1.0 / var});
    }
    return out;
}

struct Quadratic {
    std::array<double, 3> c{};
    double chi2 = std::numeric_limits<double>::infinity();
};

Quadratic solve_quadratic(const std::vector<FitPoint>& pts, double p_th, double nu) {
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const auto& pt : pts) {
        const double x = (pt.p - p_th) * std::pow(pt.d, 1.0 / nu);
        const Eigen::Vector3d row(1.0, x, x * x);
        a += pt.weight * row * row.transpose();
        b += pt.weight * pt.y * row;
    }
    Quadratic q;
    Eigen::Vector3d sol = a.ldlt().solve(b);
    if (!sol.allFinite()) {
        return q;
    }
    q.c = {sol(0), sol(1), sol(2)};
    q.chi2 = 0.0;
    for (const auto& pt : pts) {
        const double x = (pt.p - p_th) * std::pow(pt.d, 1.0 / nu);
        const double r = pt.y - (sol(0) + sol(1) * x + sol(2) * x * x);
        q.chi2 += pt.weight * r * r;
    }
    return q;
}

double minimize_pth(const std::vector<FitPoint>& pts, double lo, double hi, double nu) {
    const int grid = 120;
    double best = lo;
    double best_chi = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; i++) {
        double p = lo + (hi - lo) * i / grid;
        double c = solve_quadratic(pts, p, nu).chi2;
        if (c < best_chi) {
            best_chi = c;
            best = p;
        }
    }
    const double step = (hi - lo) / grid;
    auto r = boost::math::tools::brent_find_minima(
        [&](double p) { return solve_quadratic(pts, p, nu).chi2; }, std::max(lo, best - step),
        std::min(hi, best + step), 40);
    return r.first;
}

struct CrossingFit {
    double p_th;
    double nu;
    Quadratic q;
};

CrossingFit crossing_fit(const std::vector<FitPoint>& pts, double lo, double hi) {
    // Start from nu = 1, refine nu once at the first crossing, then refit the crossing.
    double p0 = minimize_pth(pts, lo, hi, 1.0);
    auto rn = boost::math::tools::brent_find_minima([&](double nu) { return solve_quadratic(pts, p0, nu).chi2; },
                                                    0.3, 5.0, 40);
    double nu = rn.first;
    double p1 = minimize_pth(pts, lo, hi, nu);
    return {p1, nu, solve_quadratic(pts, p1, nu)};
}

void check_crossing(const std::vector<LogicalRateEstimate>& points) {
    int dmin = std::numeric_limits<int>::max(), dmax = 0;
    double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
    for (const auto& pt : points) {
        dmin = std::min(dmin, pt.d);
        dmax = std::max(dmax, pt.d);
        pmin = std::min(pmin, pt.p);
        pmax = std::max(pmax, pt.p);
    }
    if (dmin == dmax) {
        throw std::invalid_argument("threshold fit needs at least two distances");
    }
    auto rate = [&](int d, double p) {
        for (const auto& pt : points) {
            if (pt.d == d && pt.p == p) {
                return pt.p_L;
            }
        }
        throw std::invalid_argument("threshold grid must be the same for every distance");
    };
    if (!(rate(dmin, pmin) > rate(dmax, pmin) && rate(dmin, pmax) < rate(dmax, pmax))) {
        throw NoCrossing("curves for d=" + std::to_string(dmin) + " and d=" + std::to_string(dmax) +
                         " do not cross inside the scanned window");
    }
}

}  // namespace

ThresholdEstimate fit_threshold(const std::vector<LogicalRateEstimate>& points, const ThresholdOptions& opts) {
    check_crossing(points);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<uint64_t> failures;
    std::vector<int> distances;
    for (const auto& pt : points) {
        lo = std::min(lo, pt.p);
        hi = std::max(hi, pt.p);
        failures.push_back(pt.failures);
        if (std::find(distances.begin(), distances.end(), pt.d) == distances.end()) {
            distances.push_back(pt.d);
        }
    }
    std::sort(distances.begin(), distances.end());
    CrossingFit fit = crossing_fit(fit_points(points, failures), lo, hi);
    if (fit.p_th <= lo || fit.p_th >= hi) {
        throw NoCrossing("fitted crossing lies outside the scanned window");
    }

    Rng rng(opts.bootstrap_seed);
    double sum = 0.0, sum2 = 0.0;
    int used = 0;
    for (int b = 0; b < opts.bootstrap_samples; b++) {
        std::vector<uint64_t> fake;
        for (const auto& pt : points) {
            std::binomial_distribution<uint64_t> draw(pt.trials, pt.p_L);
            fake.push_back(draw(rng));
        }
        CrossingFit bf = crossing_fit(fit_points(points, fake), lo, hi);
        sum += bf.p_th;
        sum2 += bf.p_th * bf.p_th;
        used++;
    }
    ThresholdEstimate est;
    est.p_th = fit.p_th * opts.report_scale;
    if (used > 1) {
        double mean = sum / used;
        est.uncertainty = std::sqrt(std::max(0.0, (sum2 - used * mean * mean) / (used - 1))) * opts.report_scale;
    }
    est.uncertainty = std::max(est.uncertainty, 1e-12);
    est.nu = fit.nu;
    est.distances = distances;
    est.window = {lo * opts.report_scale, hi * opts.report_scale};
    est.coefficients = fit.q.c;
    est.chi2 = fit.q.chi2;
    est.points = points;
    return est;
}

constexpr uint64_t kMinBracketFailures = 20;

std::pair<double, double> bracket_crossing(const NoiseConfig& base, int d_small, int d_large, double lo, double hi,
                                           int points, const RunPolicy& policy) {
    if (!(lo > 0.0 && hi > lo) || points < 2 || d_small >= d_large) {
        throw std::invalid_argument("bracket needs 0 < lo < hi, two points and d_small < d_large");
    }
    double prev = 0.0;
    for (int i = 0; i < points; i++) {
        NoiseConfig cfg = base;
        cfg.p = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        const LogicalRateEstimate small = estimate_logical_rate(cfg, d_small, policy);
        const double large = estimate_logical_rate(cfg, d_large, policy).p_L;
        // A handful of failures says nothing about the order of the two curves.
        if (small.failures >= kMinBracketFailures && large >= small.p_L) {
            if (i == 0) {
                throw NoCrossing("larger distance is already worse at the lowest p of the bracket scan");
            }
            return {prev, cfg.p};
        }
        prev = cfg.p;
    }
    throw NoCrossing("larger distance is still better at the highest p of the bracket scan");
}

std::vector<LogicalRateEstimate> threshold_scan(const NoiseConfig& base, const std::vector<int>& distances,
                                                const ThresholdSearch& search, const RunPolicy& policy) {
    if (distances.size() < 2) {
        throw std::invalid_argument("a threshold scan needs at least two distances");
    }
    const auto [lo, hi] = std::minmax_element(distances.begin(), distances.end());
    const auto bracket = bracket_crossing(base, *lo, *hi, search.lo, search.hi, search.bracket_points, search.coarse);
    const double mid = std::sqrt(bracket.first * bracket.second);
    auto scan = [&](double a, double b) {
        std::vector<LogicalRateEstimate> rows;
        for (int d : distances) {
            for (double p : linspace(a * mid, b * mid, search.points)) {
                NoiseConfig cfg = base;
                cfg.p = p;
                rows.push_back(estimate_logical_rate(cfg, d, policy));
            }
        }
        return rows;
    };
    std::vector<LogicalRateEstimate> rows = scan(0.75, 1.25);
    ThresholdOptions probe;
    probe.bootstrap_samples = 0;
    try {
        fit_threshold(rows, probe);
        return rows;
    } catch (const NoCrossing&) {
        // Near threshold the coarse bracket is noisy; retry once on a wider grid.
    }
    rows = scan(0.5, 1.6);
    fit_threshold(rows, probe);
    return rows;
}

ThresholdEstimate estimate_threshold(const NoiseConfig& base, const std::vector<int>& distances,
                                     const std::vector<double>& ps, const RunPolicy& policy,
                                     const ThresholdOptions& opts) {
    std::vector<LogicalRateEstimate> points;
    for (int d : distances) {
        for (double p : ps) {
            NoiseConfig cfg = base;
            cfg.p = p;
            points.push_back(estimate_logical_rate(cfg, d, policy));
        }
    }
    return fit_threshold(points, opts);
}

ExponentFit fit_exponent_points(const std::vector<LogicalRateEstimate>& points, double p_th,
                                std::pair<double, double> window) {
    std::vector<const LogicalRateEstimate*> used;
    for (const auto& pt : points) {
        double r = pt.p / p_th;
        if (r >= window.first * (1 - 1e-9) && r <= window.second * (1 + 1e-9)) {
            if (pt.failures == 0) {
                throw std::runtime_error("logical rate is zero at p=" + std::to_string(pt.p) +
                                         "; not enough trials for an exponent fit");
            }
            used.push_back(&pt);
        }
    }
    if (used.size() < 4) {
        throw std::invalid_argument("exponent fit needs at least four points in the window");
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto* pt : used) {
        const double x = std::log(pt->p);
        const double y = std::log(pt->p_L);
        const double w = static_cast<double>(pt->failures) / (1.0 - pt->p_L);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    ExponentFit fit;
    fit.nu = (sw * sxy - sx * sy) / det;
    fit.log_a = (sxx * sy - sx * sxy) / det;
    double chi2 = 0.0;
    for (const auto* pt : used) {
        const double w = static_cast<double>(pt->failures) / (1.0 - pt->p_L);
        const double r = std::log(pt->p_L) - (fit.log_a + fit.nu * std::log(pt->p));
        chi2 += w * r * r;
    }
    const double scale = std::max(1.0, chi2 / static_cast<double>(used.size() - 2));
    fit.stderr_nu = std::sqrt(sw / det * scale);
    fit.d = used.front()->d;
    fit.erasure_fraction = used.front()->erasure_fraction;
    fit.window = window;
    for (const auto* pt : used) {
        fit.points.push_back(*pt);
    }
    return fit;
}

ExponentFit fit_exponent(const NoiseConfig& cfg, int d, double p_th, std::pair<double, double> window, int num_points,
                         const RunPolicy& policy) {
    if (num_points < 4) {
        throw std::invalid_argument("exponent fit needs at least four points");
    }
    std::vector<LogicalRateEstimate> points;
    const double l0 = std::log(window.first * p_th), l1 = std::log(window.second * p_th);
    for (int i = 0; i < num_points; i++) {
        NoiseConfig c = cfg;
        c.p = std::exp(l0 + (l1 - l0) * i / (num_points - 1));
        points.push_back(estimate_logical_rate(c, d, policy));
    }
    return fit_exponent_points(points, p_th, window);
}

ThresholdEstimate run_biased_comparison(const NoiseConfig& base, double eta, const std::vector<int>& distances,
                                        const std::vector<double>& ps, const RunPolicy& policy,
                                        const ThresholdOptions& opts) {
    NoiseConfig cfg = base;
    cfg.mode = NoiseMode::Biased;
    cfg.erasure_fraction = 0.0;
    cfg.eta = eta;
    ThresholdOptions o = opts;
    o.report_scale = 2.0;
    return estimate_threshold(cfg, distances, ps, policy, o);
}

std::vector<ThresholdEstimate> run_spam_sweep(const NoiseConfig& base, const std::vector<double>& p_m_values,
                                              const std::vector<int>& distances, const std::vector<double>& ps,
                                              const RunPolicy& policy, const ThresholdOptions& opts) {
    std::vector<ThresholdEstimate> out;
    for (double pm : p_m_values) {
        NoiseConfig cfg = base;
        cfg.p_m_tracks_p = pm < 0;
        cfg.p_m = pm < 0 ? 0.0 : pm;
        out.push_back(estimate_threshold(cfg, distances, ps, policy, opts));
    }
    return out;
}

namespace {

std::string fmt6(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

void write_rates_csv(std::ostream& out, const std::vector<LogicalRateEstimate>& rows) {
    out << "d,p,R_e,p_m,eta,trials,failures,p_L,ci_low,ci_high\n";
    for (const auto& r : rows) {
        out << r.d << ',' << fmt6(r.p) << ',' << fmt6(r.erasure_fraction) << ',' << fmt6(r.p_m) << ','
            << fmt6(r.eta) << ',' << r.trials << ',' << r.failures << ',' << fmt6(r.p_L) << ',' << fmt6(r.ci_low)
            << ',' << fmt6(r.ci_high) << '\n';
    }
}

nlohmann::json rates_to_json(const std::vector<LogicalRateEstimate>& rows) {
    nlohmann::json j;
    j["schema"] = "logical-rates";
    j["version"] = kResultsSchemaVersion;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"d", r.d},
                             {"p", r.p},
                             {"R_e", r.erasure_fraction},
                             {"p_m", r.p_m},
                             {"eta", std::isinf(r.eta) ? nlohmann::json("inf") : nlohmann::json(r.eta)},
                             {"trials", r.trials},
                             {"failures", r.failures},
                             {"p_L", r.p_L},
                             {"ci_low", r.ci_low},
                             {"ci_high", r.ci_high}});
    }
    return j;
}

nlohmann::json threshold_to_json(const ThresholdEstimate& t) {
    nlohmann::json j;
    j["schema"] = "threshold";
    j["version"] = kResultsSchemaVersion;
    j["p_th"] = t.p_th;
    j["uncertainty"] = t.uncertainty;
    j["nu"] = t.nu;
    j["distances"] = t.distances;
    j["window"] = {t.window.first, t.window.second};
    j["coefficients"] = t.coefficients;
    j["chi2"] = t.chi2;
    j["points"] = rates_to_json(t.points)["rows"];
    return j;
}

nlohmann::json exponent_to_json(const ExponentFit& f) {
    nlohmann::json j;
    j["schema"] = "exponent";
    j["version"] = kResultsSchemaVersion;
    j["nu"] = f.nu;
    j["stderr"] = f.stderr_nu;
    j["d"] = f.d;
    j["R_e"] = f.erasure_fraction;
    j["window"] = {f.window.first, f.window.second};
    j["points"] = rates_to_json(f.points)["rows"];
    return j;
}

}  // namespace erasure
