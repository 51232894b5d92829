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

// Runs the command-line tool end to end and checks every file it writes.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code;
    std::string output;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(ERASURE_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 512> buf;
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(::testing::TempDir()) / ("erasure_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

const std::vector<std::string> kRatesHeader = {"d", "p", "R_e", "p_m", "eta", "trials", "failures", "p_L", "ci_low",
                                               "ci_high"};

// Every data row has the header's width and numeric cells.
void expect_table(const fs::path& p, const std::vector<std::string>& header) {
    const auto rows = read_csv(p);
    ASSERT_GE(rows.size(), 2u) << p;
    EXPECT_EQ(rows[0], header) << p;
    for (size_t r = 1; r < rows.size(); ++r) {
        ASSERT_EQ(rows[r].size(), header.size()) << p << " row " << r;
        for (const auto& cell : rows[r]) {
            if (cell == "inf" || cell == "p") continue;
            size_t used = 0;
            std::stod(cell, &used);
            EXPECT_EQ(used, cell.size()) << p << ": " << cell;
        }
    }
}

json expect_json(const fs::path& p, const std::string& schema) {
    const json j = json::parse(slurp(p));
    EXPECT_EQ(j.at("schema"), schema) << p;
    EXPECT_EQ(j.at("version"), 1) << p;
    return j;
}

void expect_manifest(const fs::path& dir, const std::string& command) {
    const json m = expect_json(dir / (command + "_manifest.json"), "run-manifest");
    EXPECT_EQ(m.at("command"), command);
    EXPECT_TRUE(m.at("config").is_object());
    EXPECT_FALSE(m.at("code_version").get<std::string>().empty());
    EXPECT_TRUE(m.contains("seed"));
    EXPECT_TRUE(m.contains("timestamp"));
    for (const auto& f : m.at("outputs")) EXPECT_TRUE(fs::exists(dir / f.get<std::string>())) << f;
}

TEST(Cli, noiseless_memory_run) {
    const fs::path dir = scratch("zero");
    const CliResult r = run("memory -d 3 --p 0 --trials 100 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const auto rows = read_csv(dir / "memory.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][5], "100");
    EXPECT_EQ(rows[1][6], "0");
    EXPECT_EQ(rows[1][7], "0");
    expect_table(dir / "memory.csv", kRatesHeader);
    expect_json(dir / "memory.json", "logical-rates");
    expect_manifest(dir, "memory");
}

TEST(Cli, memory_debug_dumps) {
    const fs::path dir = scratch("debug");
    const CliResult r = run("memory -d 3 --p 0.03 --re 0.5 --trials 50 --debug-trials 4 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(expect_json(dir / "lattice.json", "lattice-debug")["lattice"]["distance"], 3);
    EXPECT_TRUE(json::parse(slurp(dir / "graph.json")).contains("edges"));
    std::ifstream trials(dir / "trials.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(trials, line)) {
        const json t = json::parse(line);
        EXPECT_EQ(t["trial"], n++);
        EXPECT_TRUE(t.contains("defects") && t.contains("erasures"));
    }
    EXPECT_EQ(n, 4);
    int results = 0;
    std::ifstream growth(dir / "uf_trace.jsonl");
    while (std::getline(growth, line)) results += json::parse(line).contains("failed");
    EXPECT_EQ(results, 4);
    const json m = json::parse(slurp(dir / "memory_manifest.json"));
    EXPECT_NE(std::find(m["outputs"].begin(), m["outputs"].end(), "uf_trace.jsonl"), m["outputs"].end());
}

TEST(Cli, identical_flags_give_identical_files) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::string flags = "memory -d 5 --p 0.012 --re 0.5 --pm 0.002 --trials 6000 --seed 9";
    ASSERT_EQ(run(flags + " --threads 1 --out " + a.string()).code, 0);
    ASSERT_EQ(run(flags + " --threads 3 --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a / "memory.csv"), slurp(b / "memory.csv"));
    EXPECT_EQ(slurp(a / "memory.json"), slurp(b / "memory.json"));
}

TEST(Cli, out_of_range_probability_is_a_usage_error) {
    const CliResult r = run("memory -d 3 --p 1.5");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("--p"), std::string::npos);
}

TEST(Cli, unknown_command_is_a_usage_error) { EXPECT_EQ(run("frobnicate").code, 2); }

TEST(Cli, config_file_and_flag_precedence) {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "run.ini") << "p = 0.02\n[memory]\ntrials = 500\nre = 1\ndistance = 3\n";
    const CliResult r = run("memory --config " + (dir / "run.ini").string() + " --trials 300 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const auto rows = read_csv(dir / "memory.csv");
    EXPECT_EQ(rows[1][0], "3");
    EXPECT_EQ(rows[1][1], "0.02");
    EXPECT_EQ(rows[1][2], "1");
    EXPECT_EQ(rows[1][5], "300");
}

TEST(Cli, malformed_config_names_the_line) {
    const fs::path dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.ini") << "p = 0.02\n[memory\ntrials = 5\n";
    const CliResult r = run("memory --config " + (dir / "bad.ini").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
}

TEST(Cli, unknown_config_key_is_rejected) {
    const fs::path dir = scratch("typo");
    fs::create_directories(dir);
    std::ofstream(dir / "typo.ini") << "[memory]\ntrails = 5\n";
    EXPECT_EQ(run("memory --config " + (dir / "typo.ini").string()).code, 2);
}

TEST(Cli, threshold_sweep_outputs) {
    const fs::path dir = scratch("thr");
    const CliResult r = run("threshold --re 1 --distances 3,5 --p-min 0.03 --p-max 0.09 --points 5 --min-failures 200 "
                      "--max-trials 4000 --bootstrap 10 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    expect_table(dir / "threshold_rates.csv", kRatesHeader);
    expect_table(dir / "threshold_summary.csv", {"R_e", "p_th", "uncertainty", "nu"});
    const json j = expect_json(dir / "threshold.json", "threshold-sweep");
    ASSERT_EQ(j.at("results").size(), 1u);
    EXPECT_GT(j["results"][0]["p_th"].get<double>(), 0.03);
    expect_manifest(dir, "threshold");
}

TEST(Cli, missing_crossing_is_a_numerical_failure) {
    const CliResult r = run("threshold --re 1 --distances 3,5 --p-min 0.001 --p-max 0.002 --points 3 --max-trials 200 "
                      "--bootstrap 0 --out " + scratch("nocross").string());
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.output.find("crossing"), std::string::npos) << r.output;
}

TEST(Cli, exponent_outputs) {
    const fs::path dir = scratch("exp");
    const CliResult r = run("exponent -d 3 --re 1 --p-th 0.1 --window-lo 0.2 --window-hi 0.6 --points 4 "
                      "--min-failures 50 --max-trials 20000 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    expect_table(dir / "exponent_rates.csv", kRatesHeader);
    expect_table(dir / "exponent_summary.csv", {"R_e", "nu", "stderr"});
    expect_json(dir / "exponent.json", "exponent-sweep");
    expect_manifest(dir, "exponent");
}

TEST(Cli, biased_and_spam_outputs) {
    const fs::path dir = scratch("bias");
    CliResult r = run("biased --eta inf --distances 3,5 --p-min 0.01 --p-max 0.05 --points 5 --min-failures 200 "
                "--max-trials 4000 --bootstrap 5 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    expect_table(dir / "biased_rates.csv", kRatesHeader);
    EXPECT_EQ(expect_json(dir / "biased.json", "threshold").at("eta"), "inf");
    expect_manifest(dir, "biased");

    r = run("spam --re 1 --pm 0,p --distances 3,5 --p-min 0.02 --p-max 0.09 --points 5 --min-failures 200 "
            "--max-trials 4000 --bootstrap 5 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    expect_table(dir / "spam_rates.csv", kRatesHeader);
    expect_table(dir / "spam_summary.csv", {"p_m", "p_th", "uncertainty"});
    expect_json(dir / "spam.json", "spam-sweep");
    expect_manifest(dir, "spam");
}

TEST(Cli, gate_defaults_and_limits) {
    const fs::path dir = scratch("gate");
    CliResult r = run("gate --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const json j = expect_json(dir / "gate.json", "gate-physics");
    EXPECT_NEAR(j["channels"]["R_e"].get<double>(), 0.98, 0.005);
    EXPECT_NE(r.output.find("channels\n"), std::string::npos);
    EXPECT_NE(r.output.find("  R_e "), std::string::npos);
    EXPECT_NEAR(j["detection"]["cycle_time_s"].get<double>(), 110e-6, 1e-9);
    expect_manifest(dir, "gate");

    r = run("gate --gamma-q 1 --gamma-b 0 --gamma-r 0 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_LT(json::parse(slurp(dir / "gate.json"))["channels"]["R_e"].get<double>(), 0.6);

    EXPECT_EQ(run("gate --gamma-q 0.5 --out " + dir.string()).code, 2);
}

TEST(Cli, lindblad_scan_schema) {
    const fs::path dir = scratch("lb");
    const CliResult r = run("lindblad --scan --gamma-tg-min 1e-3 --gamma-tg-max 1e-2 --points 2 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    expect_table(dir / "lindblad_scan.csv",
                 {"gamma_tg", "blockade_ratio", "one_minus_f", "p_e", "one_minus_f_cond", "p_f", "p_qr", "p_qb",
                  "p_rb", "p_rr", "p_bb", "analytic_p_qr", "analytic_p_qb", "analytic_p_rb", "analytic_p_rr",
                  "analytic_p_bb", "analytic_p_e", "calibration_infidelity"});
    expect_manifest(dir, "lindblad");
}

TEST(Cli, lindblad_time_series_schema) {
    const fs::path dir = scratch("lbts");
    const CliResult r = run("lindblad --gamma-tg 1e-3 --initial 01 --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    expect_table(dir / "lindblad_series.csv", {"t", "qq", "qr", "qb", "rb", "rr", "bb", "trace"});
    expect_json(dir / "lindblad.json", "lindblad-gate");
    expect_manifest(dir, "lindblad");
}

}  // namespace
