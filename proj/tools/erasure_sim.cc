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

// Command-line front end: logical-error sweeps, gate physics and the master-equation oracle.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "erasure/constants.h"
#include "erasure/experiments.h"
#include "erasure/gate_physics.h"
#include "erasure/lindblad.h"
#include "erasure/uf_decoder.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace erasure;

namespace {

constexpr int kUsageError = 2;
constexpr int kNumericalError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// INI files: keys in [command] sections apply to that command, keys before any
// section apply to whichever command runs. Lists are comma separated.
class IniConfig : public CLI::Config {
   public:
    explicit IniConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw CLI::ConfigError("config file line " + std::to_string(e.line()) + ": " + e.message());
        }
        std::string active;
        for (const CLI::App* sub : root_->get_subcommands()) active = sub->get_name();
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, node] : tree) {
            if (node.empty()) {
                items.push_back(item(active.empty() ? std::vector<std::string>{} : std::vector{active}, key,
                                     node.data()));
                continue;
            }
            for (const auto& [sub_key, leaf] : node) items.push_back(item({key}, sub_key, leaf.data()));
        }
        return items;
    }

   private:
    static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name, const std::string& value) {
        CLI::ConfigItem it;
        it.parents = std::move(parents);
        it.name = name;
        std::stringstream ss(value);
        std::string part;
        while (std::getline(ss, part, ',')) {
            const auto b = part.find_first_not_of(" \t");
            const auto e = part.find_last_not_of(" \t");
            if (b != std::string::npos) it.inputs.push_back(part.substr(b, e - b + 1));
        }
        return it;
    }

    const CLI::App* root_;
};

// Rounds every floating-point value to six significant digits.
void round_floats(json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v)) {
            std::ostringstream os;
            os << std::setprecision(6) << v;
            j = std::stod(os.str());
        } else {
            j = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
        }
        return;
    }
    if (j.is_structured()) {
        for (auto& v : j) round_floats(v);
    }
}

std::string fmt6(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

struct Common {
    uint64_t seed = 1;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out = ".";
};

class Emitter {
   public:
    Emitter(const CLI::App& cmd, const Common& common) : cmd_(cmd), dir_(common.out) {
        fs::create_directories(dir_);
    }

    fs::path path(const std::string& file) {
        outputs_.push_back(file);
        return dir_ / file;
    }

    // Resolved options plus provenance, written before any computation.
    void manifest(const Common& common) {
        json cfg = json::object();
        for (const CLI::Option* opt : cmd_.get_options()) {
            if (opt->get_lnames().empty()) continue;
            const std::string name = opt->get_lnames().front();
            if (name == "help") continue;
            if (opt->count() > 0) {
                const auto& res = opt->results();
                cfg[name] = res.size() == 1 ? json(res.front()) : json(res);
            } else if (opt->get_expected_min() == 0) {
                cfg[name] = "false";
            } else {
                cfg[name] = opt->get_default_str();
            }
        }
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::ostringstream ts;
        ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
        json m = {{"schema", "run-manifest"},
                  {"version", kResultsSchemaVersion},
                  {"command", cmd_.get_name()},
                  {"config", cfg},
                  {"code_version", ERASURE_CODE_VERSION},
                  {"seed", common.seed},
                  {"timestamp", ts.str()},
                  {"outputs", outputs_}};
        std::ofstream(dir_ / (cmd_.get_name() + "_manifest.json")) << m.dump(2) << '\n';
    }

    void write_json(const fs::path& p, json j) {
        round_floats(j);
        std::ofstream(p) << j.dump(2) << '\n';
    }

   private:
    const CLI::App& cmd_;
    fs::path dir_;
    std::vector<std::string> outputs_;
};

// Positive, with infinity allowed (pure dephasing bias).
const CLI::Validator kPositiveOrInf(
    [](std::string& s) -> std::string {
        double v = 0.0;
        if (!CLI::detail::lexical_cast(s, v) || !(v > 0.0)) return "value must be positive or inf, got " + s;
        return {};
    },
    "POSITIVE|inf");

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "Output directory");
}

struct NoiseArgs {
    double re = 0.0;
    double pm = 0.0;
    bool pm_tracks_p = false;
    std::string mode = "erasure";
    double eta = std::numeric_limits<double>::infinity();
};

void add_noise(CLI::App* cmd, NoiseArgs& n, bool with_re = true) {
    if (with_re) cmd->add_option("--re", n.re, "Erasure fraction R_e")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--pm", n.pm, "Ancilla preparation and measurement error")->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--pm-tracks-p", n.pm_tracks_p, "Set p_m equal to p");
}

NoiseConfig noise_config(const NoiseArgs& n, double p, uint64_t seed) {
    NoiseConfig c;
    c.p = p;
    c.erasure_fraction = n.re;
    c.p_m = n.pm;
    c.p_m_tracks_p = n.pm_tracks_p;
    c.mode = n.mode == "biased" ? NoiseMode::Biased : NoiseMode::Erasure;
    c.eta = n.eta;
    c.seed = seed;
    c.validate();
    return c;
}

struct PolicyArgs {
    uint64_t min_failures = 1000;
    uint64_t max_trials = 100000;
    uint64_t chunk = 2000;
};

void add_policy(CLI::App* cmd, PolicyArgs& p) {
    cmd->add_option("--min-failures", p.min_failures, "Stop a point once this many failures are seen");
    cmd->add_option("--max-trials", p.max_trials, "Trial cap per point")->check(CLI::PositiveNumber);
    cmd->add_option("--chunk", p.chunk, "Trials per work unit")->check(CLI::PositiveNumber);
}

RunPolicy policy(const PolicyArgs& p, const Common& c) {
    RunPolicy r;
    r.min_failures = p.min_failures;
    r.max_trials = p.max_trials;
    r.chunk = p.chunk;
    r.threads = c.threads;
    return r;
}

struct GridArgs {
    std::vector<double> p_min;
    std::vector<double> p_max;
    int points = 9;
    std::vector<int> distances{5, 7};
    int bootstrap = 200;
};

void add_grid(CLI::App* cmd, GridArgs& g) {
    cmd->add_option("--p-min", g.p_min, "Lowest p of the scan, one value or one per sweep entry")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--p-max", g.p_max, "Highest p of the scan, one value or one per sweep entry")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--points", g.points, "Grid points per distance")->check(CLI::Range(3, 1000));
    cmd->add_option("--distances", g.distances, "Code distances")->delimiter(',')->check(CLI::Range(2, 99));
    cmd->add_option("--bootstrap", g.bootstrap, "Bootstrap resamples for the threshold uncertainty")
        ->check(CLI::NonNegativeNumber);
}

// Rates for sweep entry k; without an explicit range the grid is placed automatically.
std::vector<LogicalRateEstimate> scan(const GridArgs& g, size_t k, size_t entries, const NoiseConfig& base,
                                      const RunPolicy& pol) {
    auto pick = [&](const std::vector<double>& v, const char* name) {
        if (v.size() == 1) return v[0];
        if (v.size() != entries) throw UsageError(std::string(name) + " needs one value or one per sweep entry");
        return v[k];
    };
    if (g.p_min.empty() != g.p_max.empty()) throw UsageError("--p-min and --p-max go together");
    if (g.distances.size() < 2) throw UsageError("a threshold needs at least two distances");
    if (g.p_min.empty()) {
        ThresholdSearch search;
        search.points = g.points;
        search.coarse = pol;
        search.coarse.min_failures = std::min<uint64_t>(pol.min_failures, 200);
        search.coarse.max_trials = std::min<uint64_t>(pol.max_trials, 20000);
        return threshold_scan(base, g.distances, search, pol);
    }
    const double lo = pick(g.p_min, "--p-min"), hi = pick(g.p_max, "--p-max");
    if (!(hi > lo)) throw UsageError("--p-max must exceed --p-min");
    std::vector<LogicalRateEstimate> rows;
    for (int d : g.distances) {
        for (double p : linspace(lo, hi, g.points)) {
            NoiseConfig c = base;
            c.p = p;
            rows.push_back(estimate_logical_rate(c, d, pol));
        }
    }
    return rows;
}

void write_csv(const fs::path& p, const std::vector<LogicalRateEstimate>& rows) {
    std::ofstream out(p);
    write_rates_csv(out, rows);
}

// ---- commands ----

struct MemoryArgs {
    int distance = 3;
    double p = 0.0;
    uint64_t trials = 10000;
    uint64_t min_failures = 0;
    uint64_t debug_trials = 0;
    NoiseArgs noise;
};

// Lattice, schedule and graph dumps plus per-trial syndromes and cluster growth, for
// inspecting the decoder with external tools.
void write_debug(Emitter& em, const std::vector<fs::path>& files, const MemoryArgs& a, const NoiseConfig& cfg) {
    const Lattice lat = build_lattice({a.distance, 0});
    const Schedule sched = build_schedule(lat);
    const CircuitLayout layout = CircuitLayout::build(lat, sched, a.distance);
    const FaultEffectTable table(lat, sched, layout);
    const DecodingGraph graph = build_graph(lat, layout, table, cfg);
    em.write_json(files[0], {{"schema", "lattice-debug"},
                             {"version", kResultsSchemaVersion},
                             {"lattice", lattice_to_json(lat)},
                             {"schedule", schedule_to_json(sched)}});
    em.write_json(files[1], graph_to_json(graph));
    std::ofstream trials(files[2]), growth(files[3]);
    UnionFindDecoder dec(graph);
    dec.set_trace(&growth);
    for (uint64_t i = 0; i < a.debug_trials; ++i) {
        // Streams far above those used by the rate estimate.
        Rng rng(cfg.seed, (uint64_t{1} << 48) + i);
        const SyndromeTrial t = run_trial(lat, sched, layout, cfg, rng);
        write_trial_json(trials, i, t);
        growth << json{{"trial", i}, {"defects", t.defects().size()}}.dump() << '\n';
        const DecodeResult r = dec.decode(t.defects(), overlay_erasures(graph, t.erasures));
        growth << json{{"trial", i}, {"logical_parity", r.logical_parity}, {"failed", r.logical_parity != t.logical_flips}}
                      .dump()
               << '\n';
    }
}

int cmd_memory(const CLI::App& cmd, const MemoryArgs& a, const Common& c) {
    Emitter em(cmd, c);
    const fs::path csv = em.path("memory.csv"), js = em.path("memory.json");
    const NoiseConfig cfg = noise_config(a.noise, a.p, c.seed);
    std::vector<fs::path> debug;
    if (a.debug_trials > 0) {
        for (const char* f : {"lattice.json", "graph.json", "trials.jsonl", "uf_trace.jsonl"}) debug.push_back(em.path(f));
    }
    em.manifest(c);
    RunPolicy pol;
    pol.max_trials = a.trials;
    pol.min_failures = a.min_failures > 0 ? a.min_failures : a.trials;
    pol.chunk = std::min<uint64_t>(2000, a.trials);
    pol.threads = c.threads;
    if (a.debug_trials > 0) write_debug(em, debug, a, cfg);
    const LogicalRateEstimate e = estimate_logical_rate(cfg, a.distance, pol);
    write_csv(csv, {e});
    em.write_json(js, rates_to_json({e}));
    write_rates_csv(std::cout, {e});
    return 0;
}

struct ThresholdArgs {
    std::vector<double> re{0.98};
    NoiseArgs noise;
    GridArgs grid;
    PolicyArgs pol;
};

json summary_row(const ThresholdEstimate& t) { return threshold_to_json(t); }

int cmd_threshold(const CLI::App& cmd, const ThresholdArgs& a, const Common& c) {
    Emitter em(cmd, c);
    const fs::path csv = em.path("threshold_rates.csv"), js = em.path("threshold.json"),
                   sum = em.path("threshold_summary.csv");
    em.manifest(c);
    const RunPolicy pol = policy(a.pol, c);
    ThresholdOptions opts;
    opts.bootstrap_samples = a.grid.bootstrap;
    opts.bootstrap_seed = c.seed;
    std::vector<LogicalRateEstimate> all;
    json results = json::array();
    std::ofstream summary(sum);
    summary << "R_e,p_th,uncertainty,nu\n";
    for (size_t k = 0; k < a.re.size(); ++k) {
        NoiseArgs n = a.noise;
        n.re = a.re[k];
        const NoiseConfig base = noise_config(n, 0.0, c.seed);
        const auto rows = scan(a.grid, k, a.re.size(), base, pol);
        all.insert(all.end(), rows.begin(), rows.end());
        write_csv(csv, all);
        const ThresholdEstimate t = fit_threshold(rows, opts);
        json r = summary_row(t);
        r["R_e"] = a.re[k];
        results.push_back(r);
        summary << fmt6(a.re[k]) << ',' << fmt6(t.p_th) << ',' << fmt6(t.uncertainty) << ',' << fmt6(t.nu) << '\n';
        std::cout << "R_e=" << fmt6(a.re[k]) << " p_th=" << fmt6(t.p_th) << " +- " << fmt6(t.uncertainty) << '\n';
    }
    em.write_json(js, {{"schema", "threshold-sweep"}, {"version", kResultsSchemaVersion}, {"results", results}});
    return 0;
}

struct ExponentArgs {
    int distance = 5;
    std::vector<double> re{0.0};
    std::vector<double> p_th;
    double window_lo = 0.2;
    double window_hi = 0.8;
    int points = 8;
    NoiseArgs noise;
    PolicyArgs pol;
};

int cmd_exponent(const CLI::App& cmd, const ExponentArgs& a, const Common& c) {
    if (a.p_th.size() != a.re.size()) throw UsageError("--p-th needs one value per --re value");
    if (!(a.window_hi > a.window_lo && a.window_lo > 0)) throw UsageError("window must satisfy 0 < lo < hi");
    Emitter em(cmd, c);
    const fs::path csv = em.path("exponent_rates.csv"), js = em.path("exponent.json"),
                   sum = em.path("exponent_summary.csv");
    em.manifest(c);
    std::vector<LogicalRateEstimate> all;
    json results = json::array();
    std::ofstream summary(sum);
    summary << "R_e,nu,stderr\n";
    for (size_t k = 0; k < a.re.size(); ++k) {
        NoiseArgs n = a.noise;
        n.re = a.re[k];
        const ExponentFit f = fit_exponent(noise_config(n, 0.0, c.seed), a.distance, a.p_th[k],
                                           {a.window_lo, a.window_hi}, a.points, policy(a.pol, c));
        all.insert(all.end(), f.points.begin(), f.points.end());
        write_csv(csv, all);
        results.push_back(exponent_to_json(f));
        summary << fmt6(a.re[k]) << ',' << fmt6(f.nu) << ',' << fmt6(f.stderr_nu) << '\n';
        std::cout << "R_e=" << fmt6(a.re[k]) << " nu=" << fmt6(f.nu) << " +- " << fmt6(f.stderr_nu) << '\n';
    }
    em.write_json(js, {{"schema", "exponent-sweep"}, {"version", kResultsSchemaVersion}, {"results", results}});
    return 0;
}

struct BiasedArgs {
    double eta = 100.0;
    GridArgs grid;
    PolicyArgs pol;
};

int cmd_biased(const CLI::App& cmd, const BiasedArgs& a, const Common& c) {
    Emitter em(cmd, c);
    const fs::path csv = em.path("biased_rates.csv"), js = em.path("biased.json");
    em.manifest(c);
    NoiseArgs n;
    n.mode = "biased";
    n.eta = a.eta;
    const NoiseConfig base = noise_config(n, 0.0, c.seed);
    const RunPolicy pol = policy(a.pol, c);
    const auto rows = scan(a.grid, 0, 1, base, pol);
    write_csv(csv, rows);
    ThresholdOptions opts;
    opts.bootstrap_samples = a.grid.bootstrap;
    opts.bootstrap_seed = c.seed;
    opts.report_scale = 2.0;
    json r = threshold_to_json(fit_threshold(rows, opts));
    r["eta"] = std::isinf(a.eta) ? json("inf") : json(a.eta);
    r["units"] = "total two-qubit infidelity";
    em.write_json(js, r);
    std::cout << "eta=" << fmt6(a.eta) << " p_th=" << fmt6(r["p_th"].get<double>()) << '\n';
    return 0;
}

struct SpamArgs {
    std::vector<std::string> pm{"0", "0.001", "0.005", "p"};
    double re = 0.98;
    GridArgs grid;
    PolicyArgs pol;
};

int cmd_spam(const CLI::App& cmd, const SpamArgs& a, const Common& c) {
    std::vector<double> values;
    for (const auto& s : a.pm) {
        if (s == "p") {
            values.push_back(-1.0);
            continue;
        }
        try {
            values.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw UsageError("--pm values must be numbers or 'p', got " + s);
        }
        if (!(values.back() >= 0.0 && values.back() <= 1.0)) throw UsageError("--pm values must lie in [0, 1]");
    }
    Emitter em(cmd, c);
    const fs::path csv = em.path("spam_rates.csv"), js = em.path("spam.json"), sum = em.path("spam_summary.csv");
    em.manifest(c);
    const RunPolicy pol = policy(a.pol, c);
    ThresholdOptions opts;
    opts.bootstrap_samples = a.grid.bootstrap;
    opts.bootstrap_seed = c.seed;
    std::vector<LogicalRateEstimate> all;
    json results = json::array();
    std::ofstream summary(sum);
    summary << "p_m,p_th,uncertainty\n";
    for (size_t k = 0; k < values.size(); ++k) {
        NoiseArgs n;
        n.re = a.re;
        n.pm = std::max(0.0, values[k]);
        n.pm_tracks_p = values[k] < 0;
        const NoiseConfig base = noise_config(n, 0.0, c.seed);
        const auto rows = scan(a.grid, k, values.size(), base, pol);
        all.insert(all.end(), rows.begin(), rows.end());
        write_csv(csv, all);
        const ThresholdEstimate t = fit_threshold(rows, opts);
        json r = threshold_to_json(t);
        r["p_m"] = values[k] < 0 ? json("p") : json(values[k]);
        results.push_back(r);
        summary << a.pm[k] << ',' << fmt6(t.p_th) << ',' << fmt6(t.uncertainty) << '\n';
        std::cout << "p_m=" << a.pm[k] << " p_th=" << fmt6(t.p_th) << " +- " << fmt6(t.uncertainty) << '\n';
    }
    em.write_json(js, {{"schema", "spam-sweep"}, {"version", kResultsSchemaVersion}, {"results", results}});
    return 0;
}

struct PhysicsArgs {
    double gamma_tg = 2e-3;
    double frac_q = 0.05;
    double frac_b = 0.61;
    double frac_r = 0.34;
    double v_over_gamma = 1e6;
};

void add_physics(CLI::App* cmd, PhysicsArgs& a) {
    cmd->add_option("--gamma-tg", a.gamma_tg, "Decay probability scale Gamma*t_g")->check(CLI::PositiveNumber);
    cmd->add_option("--gamma-q", a.frac_q, "Fraction of decays returning to the qubit subspace");
    cmd->add_option("--gamma-b", a.frac_b, "Fraction of blackbody transfers to nearby Rydberg states");
    cmd->add_option("--gamma-r", a.frac_r, "Fraction of radiative decays to the ground state");
    cmd->add_option("--v-over-gamma", a.v_over_gamma, "Interaction strength over decay rate")
        ->check(CLI::PositiveNumber);
}

GatePhysicsConfig physics_config(const PhysicsArgs& a, double t_g) {
    GatePhysicsConfig cfg;
    cfg.frac_q = a.frac_q;
    cfg.frac_b = a.frac_b;
    cfg.frac_r = a.frac_r;
    cfg.omega = 1.0;
    cfg.t_g = t_g;
    cfg.gamma = a.gamma_tg / t_g;
    cfg.v_rr = cfg.v_rp = cfg.v_pp = a.v_over_gamma * cfg.gamma;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

// Calibrates at the interaction strength implied by Gamma*t_g and V/Gamma.
PulseCalibration calibrate_for(const PhysicsArgs& a) {
    CalibrationOptions opts;
    opts.min_blockade_ratio = 1.0;
    PulseCalibration cal = calibrate_pulse(1.0, 1e3);
    for (int iter = 0; iter < 3; ++iter) {
        opts.has_guess = true;
        opts.guess[0] = cal.delta_over_omega;
        opts.guess[1] = cal.tau_omega;
        opts.guess[2] = cal.xi;
        cal = calibrate_pulse(1.0, a.v_over_gamma * a.gamma_tg / cal.pulse.duration(), opts);
    }
    return cal;
}

struct GateArgs {
    PhysicsArgs phys;
    std::string levels = ERASURE_DATA_DIR "/yb171_6s7s_3S1.ini";
};

int cmd_gate(const CLI::App& cmd, const GateArgs& a, const Common& c) {
    physics_config(a.phys, 8.586);  // validates before any output is written
    Emitter em(cmd, c);
    const fs::path js = em.path("gate.json");
    em.manifest(c);
    const PulseCalibration cal = calibrate_for(a.phys);
    const GatePhysicsConfig cfg = physics_config(a.phys, cal.pulse.duration());
    const TrajectoryCoefficients coeff =
        trajectory_coefficients(noiseless_trajectory(cal.pulse, cfg.v_rr), cfg.omega, cfg.v_rr, cfg.v_rp);
    const ChannelProbabilities ch = channel_probabilities(cfg, coeff);
    const BranchingInput levels = load_branching_input(a.levels);
    const std::vector<double> ratios = branching_ratios(levels);
    json branching = json::object();
    for (size_t k = 0; k < ratios.size(); ++k) branching[levels.finals[k].label] = ratios[k];
    const DetectionBudgetConfig det;
    DetectionBudgetConfig ion = det;
    ion.gamma_img = 2 * constants::kPi * 19e6;
    ion.wavelength = 369e-9;
    const IonSpread spread = ion_spread(ion, ion.n_photons);
    const CycleTimeConfig cycle;
    json j = {{"schema", "gate-physics"},
              {"version", kResultsSchemaVersion},
              {"gamma_tg", a.phys.gamma_tg},
              {"pulse",
               {{"delta_over_omega", cal.delta_over_omega},
                {"tau_omega", cal.tau_omega},
                {"xi", cal.xi},
                {"t_g_omega", cal.pulse.duration()},
                {"infidelity", cal.infidelity}}},
              {"coefficients", coefficients_to_json(coeff)},
              {"channels", channels_to_json(ch)},
              {"branching", branching},
              {"detection",
               {{"ion_rms_per_photon_m", ion_spread(ion, 1.0).rms},
                {"ion_photons", ion.n_photons},
                {"ion_drift_m", spread.drift},
                {"neutral_rms_10us_m", neutral_atom_spread(det, 10e-6)},
                {"cycle_time_s", cycle_time(cycle)}}}};
    em.write_json(js, j);
    for (const auto& [section, values] : j.items()) {
        if (!values.is_object()) continue;
        std::cout << section << '\n';
        for (const auto& [key, v] : values.items()) {
            std::cout << "  " << std::left << std::setw(22) << key << fmt6(v.get<double>()) << '\n';
        }
    }
    return 0;
}

struct LindbladArgs {
    PhysicsArgs phys;
    bool scan = false;
    double g_min = 1e-4;
    double g_max = 1e-2;
    int points = 9;
    int steps = 100;
    std::string initial = "11";
};

int cmd_lindblad(const CLI::App& cmd, const LindbladArgs& a, const Common& c) {
    physics_config(a.phys, 8.586);
    if (a.scan && !(a.g_max > a.g_min && a.g_min > 0)) throw UsageError("scan needs 0 < min < max");
    Emitter em(cmd, c);
    IntegratorOptions integ;
    integ.steps_per_segment = a.steps;
    if (a.scan) {
        const fs::path csv = em.path("lindblad_scan.csv");
        em.manifest(c);
        std::vector<double> g;
        for (int i = 0; i < a.points; ++i) {
            g.push_back(a.g_min * std::pow(a.g_max / a.g_min, a.points > 1 ? double(i) / (a.points - 1) : 0.0));
        }
        SweepOptions opts;
        opts.v_over_gamma = a.phys.v_over_gamma;
        opts.base = physics_config(a.phys, 8.586);
        opts.integrator = integ;
        opts.threads = static_cast<int>(c.threads);
        const auto pts = sweep_gate_error(g, opts);
        std::ofstream out(csv);
        write_sweep_csv(out, pts);
        write_sweep_csv(std::cout, pts);
        return 0;
    }
    const fs::path series = em.path("lindblad_series.csv"), js = em.path("lindblad.json");
    em.manifest(c);
    const PulseCalibration cal = calibrate_for(a.phys);
    const GatePhysicsConfig cfg = physics_config(a.phys, cal.pulse.duration());
    Eigen::Matrix<Complex, 25, 1> psi = Eigen::Matrix<Complex, 25, 1>::Zero();
    psi[pair_index(a.initial[0] - '0', a.initial[1] - '0')] = 1.0;
    std::ofstream ts(series);
    integ.series = &ts;
    const SubspacePopulations p = evolve_state(cal.pulse, cfg, psi, integ);
    integ.series = nullptr;
    const GateOutcome o = evolve(cal.pulse, cfg, integ);
    json j = {{"schema", "lindblad-gate"},
              {"version", kResultsSchemaVersion},
              {"gamma_tg", a.phys.gamma_tg},
              {"initial", a.initial},
              {"final_populations",
               {{"QQ", p.qq}, {"QR", p.qr}, {"QB", p.qb}, {"RB", p.rb}, {"RR", p.rr}, {"BB", p.bb}}},
              {"one_minus_f", 1 - o.fidelity},
              {"one_minus_f_cond", 1 - o.conditional_fidelity},
              {"p_e", o.p_e},
              {"p_f", o.p_f},
              {"trace_error", o.trace_error}};
    em.write_json(js, j);
    std::cout << "1-F = " << fmt6(1 - o.fidelity) << "\np_e = " << fmt6(o.p_e) << "\n1-F_cond = "
              << fmt6(1 - o.conditional_fidelity) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surface-code memory simulations with erasure conversion, and Rydberg gate error models"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "INI configuration file; command-line flags take precedence");
    app.config_formatter(std::make_shared<IniConfig>(&app));
    app.allow_config_extras(CLI::config_extras_mode::error);

    Common common;

    MemoryArgs mem;
    auto* memory = app.add_subcommand("memory", "Logical error rate of one code at one noise point");
    memory->add_option("-d,--distance", mem.distance, "Code distance")->check(CLI::Range(2, 99));
    memory->add_option("--p", mem.p, "Two-qubit gate error probability")->check(CLI::Range(0.0, 1.0));
    memory->add_option("--trials", mem.trials, "Number of trials")->check(CLI::PositiveNumber);
    memory->add_option("--min-failures", mem.min_failures, "Stop early after this many failures (0: never)");
    memory->add_option("--debug-trials", mem.debug_trials,
                       "Also dump lattice, graph, and syndromes and cluster growth of this many trials");
    memory->add_option("--mode", mem.noise.mode, "Noise model")
        ->check(CLI::IsMember({"erasure", "biased"}));
    memory->add_option("--eta", mem.noise.eta, "Bias ratio for --mode biased")->check(kPositiveOrInf);
    add_noise(memory, mem.noise);
    add_common(memory, common);

    ThresholdArgs thr;
    auto* threshold = app.add_subcommand("threshold", "Threshold crossing for one or more erasure fractions");
    threshold->add_option("--re", thr.re, "Erasure fractions")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    add_noise(threshold, thr.noise, false);
    add_grid(threshold, thr.grid);
    add_policy(threshold, thr.pol);
    add_common(threshold, common);

    ExponentArgs exa;
    auto* exponent = app.add_subcommand("exponent", "Sub-threshold scaling exponent of p_L");
    exponent->add_option("-d,--distance", exa.distance, "Code distance")->check(CLI::Range(2, 99));
    exponent->add_option("--re", exa.re, "Erasure fractions")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    exponent->add_option("--p-th", exa.p_th, "Threshold for each erasure fraction")
        ->delimiter(',')
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    exponent->add_option("--window-lo", exa.window_lo, "Lower end of the fit window in units of p_th");
    exponent->add_option("--window-hi", exa.window_hi, "Upper end of the fit window in units of p_th");
    exponent->add_option("--points", exa.points, "Log-spaced points in the window")->check(CLI::Range(4, 1000));
    add_noise(exponent, exa.noise, false);
    add_policy(exponent, exa.pol);
    add_common(exponent, common);

    BiasedArgs bia;
    auto* biased = app.add_subcommand("biased", "Threshold under Z-biased Pauli noise");
    biased->add_option("--eta", bia.eta, "Bias ratio (inf for pure Z)")->check(kPositiveOrInf);
    add_grid(biased, bia.grid);
    add_policy(biased, bia.pol);
    add_common(biased, common);

    SpamArgs spa;
    auto* spam = app.add_subcommand("spam", "Threshold versus ancilla preparation and measurement error");
    spam->add_option("--pm", spa.pm, "Values of p_m, or 'p' to track the gate error")->delimiter(',');
    spam->add_option("--re", spa.re, "Erasure fraction")->check(CLI::Range(0.0, 1.0));
    add_grid(spam, spa.grid);
    add_policy(spam, spa.pol);
    add_common(spam, common);

    GateArgs gta;
    auto* gate = app.add_subcommand("gate", "Analytic gate error channels, branching ratios and detection budget");
    add_physics(gate, gta.phys);
    gate->add_option("--levels", gta.levels, "Level data file for the branching-ratio calculation");
    add_common(gate, common);

    LindbladArgs lba;
    auto* lindblad = app.add_subcommand("lindblad", "Master-equation simulation of the two-atom gate");
    add_physics(lindblad, lba.phys);
    lindblad->add_flag("--scan", lba.scan, "Scan Gamma*t_g and write the gate-error table");
    lindblad->add_option("--gamma-tg-min", lba.g_min, "Scan start")->check(CLI::PositiveNumber);
    lindblad->add_option("--gamma-tg-max", lba.g_max, "Scan end")->check(CLI::PositiveNumber);
    lindblad->add_option("--points", lba.points, "Scan points")->check(CLI::Range(1, 1000));
    lindblad->add_option("--steps", lba.steps, "Integrator steps per pulse segment")->check(CLI::PositiveNumber);
    lindblad->add_option("--initial", lba.initial, "Initial computational state for the time series")
        ->check(CLI::IsMember({"00", "01", "10", "11"}));
    add_common(lindblad, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*memory) return cmd_memory(*memory, mem, common);
        if (*threshold) return cmd_threshold(*threshold, thr, common);
        if (*exponent) return cmd_exponent(*exponent, exa, common);
        if (*biased) return cmd_biased(*biased, bia, common);
        if (*spam) return cmd_spam(*spam, spa, common);
        if (*gate) return cmd_gate(*gate, gta, common);
        if (*lindblad) return cmd_lindblad(*lindblad, lba, common);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const NoCrossing& e) {
        std::cerr << "no threshold crossing: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return kUsageError;
}
